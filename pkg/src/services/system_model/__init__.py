"""
System Model Service

Mass, stiffness and damper geometry of a viscously damped vibrating system:
- n-mass oscillator benchmark instances
- internal (critical) and external damping assembly
- quadratic eigenvalue residuals
"""
