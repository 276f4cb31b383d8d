# Test package for qutrit-qrng
