"""Tests package for iimp-sim"""
