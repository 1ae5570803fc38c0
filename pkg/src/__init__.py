"""
Beltree: belief functions on trees and hypertrees.
"""
