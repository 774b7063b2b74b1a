"""
Test suite for the road network classifier
"""
