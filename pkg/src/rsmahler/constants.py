"""Reference constants, 20 significant digits from high-precision evaluation."""

SQRT_2_OVER_E = 0.85776388496070679648  # (2/e)^(1/2)
EULER_GAMMA = 0.57721566490153286061
E_NEG_HALF_GAMMA = 0.74930600128844902361  # exp(-gamma/2)
GAMMA_RS = 0.14644660940672623780  # sin^2(pi/8) = (2 - sqrt 2)/4
ZERO_COUNT_C2 = 0.25  # qualifying threshold |P(z0)| >= c2 * sup|P|
