"""Domain layer: polynomial algebra, harmonic analysis, program assembly and energies."""
