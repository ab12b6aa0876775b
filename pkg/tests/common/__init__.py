"""Tests for common layer"""
