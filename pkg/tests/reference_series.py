"""Published oven-roast validation series (core temperature).

Experimental thermocouple points and the corresponding simulated curve,
used to exercise the error metrics on real data.
"""

import numpy as np

# (t [s], T [K]) thermocouple measurements at the cuboid core
EXPERIMENT_CORE = np.array([
    [4.65211601399393, 279.880361509235],
    [58.1198961742468, 280.897101531054],
    [119.057036451868, 284.066946920964],
    [178.900282135199, 290.27565173231],
    [237.666899898431, 297.37063724937],
    [299.632930820449, 305.605448971147],
    [359.457894142873, 314.093354775608],
    [418.22654327954, 320.935095737878],
    [479.137275702517, 327.397120340067],
    [537.91405033292, 333.225883083173],
    [598.830876876199, 338.928174020991],
    [656.543211827108, 344.123750141068],
    [719.608215777001, 348.686591054433],
    [777.33070759508, 352.615944400557],
    [838.26480081255, 356.165656622654],
    [899.198894030019, 359.71536884475],
    [959.075657375014, 361.74553850205],
    [1018.95242072001, 363.77570815935],
    [1079.8997178648, 365.679330775308],
    [1138.71305721702, 366.949691532182],
    [1197.52842794267, 367.966807734266],
])

# simulated core temperature, 15 s cadence
SIMULATION_CORE_T = np.arange(0.0, 1201.0, 15.0)
SIMULATION_CORE = np.array([
    279.15, 279.15004960213, 279.158984587679, 279.246815484258,
    279.527786789587, 280.076075890156, 280.908313337782, 282.005289257995,
    283.332604049583, 284.852194161869, 286.527469872022, 288.325332876833,
    290.21684310969, 292.177241026086, 294.185646131406, 296.224640758342,
    298.279857741424, 300.339608403261, 302.394544045778, 304.437338445846,
    306.462386983251, 308.465524901536, 310.443769704963, 312.395092739575,
    314.318219175537, 316.212454335197, 318.077531927045, 319.913482030539,
    321.72051871463, 323.498946165199, 325.249081770922, 326.971193435691,
    328.665445304033, 330.331843976883, 331.970176450387, 333.579935420842,
    335.160264179243, 336.709982179199, 338.227757352305, 339.712435358084,
    341.163430346594, 342.581000816035, 343.965260315799, 345.311221930831,
    346.610897741651, 347.860462314634, 349.060258256211, 350.211990038475,
    351.31679506899, 352.37488998216, 353.386129586329, 354.350620112121,
    355.268773745702, 356.141523445503, 356.970230101736, 357.756436334805,
    358.501832714222, 359.208195301995, 359.877333484608, 360.511051031686,
    361.11111859045, 361.679255209454, 362.217116731782, 362.7262891553,
    363.208285459292, 363.664544894979, 364.096433922609, 364.505248217424,
    364.892215292125, 365.258497492555, 365.605195156902, 365.933349796581,
    366.243948493688, 366.537925940441, 366.816162976031, 367.079495183518,
    367.328714288016, 367.564570122431, 367.78777279822, 367.998994824066,
    368.198873111585,
])
