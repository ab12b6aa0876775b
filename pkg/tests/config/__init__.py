"""Tests for config layer"""
