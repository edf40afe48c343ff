"""Built-in windows; config/kpwindow.ini and the command-line flags override them."""

# highest u-exponent (exclusive) kept when a series is truncated
U_CAP = 16
# t-exponent (exclusive) where truncated series stop, and the top of the default box
T_CAP = 8
T_LO = -8
# operator floor: terms of lower degree are unknown
FLOOR = -8
# hard cap for the KP depth escalation
DEPTH_CAP = 12
# box enlargement used when checking stability
MARGIN = 2
