"""
Helpers shared by the test modules of every app: config factories, small
platform builders and scenario documents.
"""
