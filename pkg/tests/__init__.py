"""Test suite for the FEM updating benchmark"""
