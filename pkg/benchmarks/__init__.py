"""
Timing scripts for the metric stage
"""
