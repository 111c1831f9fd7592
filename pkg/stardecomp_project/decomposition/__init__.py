"""
Star-edge stabilizer decomposition engine for MCT-dense circuits.
"""
