"""Capacity analysis and phase optimization for RIS-aided uplink multi-user MIMO."""
