"""Use cases layer: one class per rbound action."""
