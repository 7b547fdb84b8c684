"""Symmetric triangle rules (Dunavant orbit structure), polished to double
precision against exact monomial moments.

Each rule is a list of orbits ``(kind, weight, *coords)`` with area-normalized
weights: ``s3`` is the centroid, ``s21`` is ``(a, a, 1 - 2a)`` and ``s111`` is
``(a, b, 1 - a - b)`` with all six permutations.
"""

RULES = {
    1: [('s3', 1.0)],
    2: [
        ('s21', 0.3333333333333333, 0.16666666666666669),
    ],
    4: [
        ('s21', 0.22338158967801128, 0.44594849091596483),
        ('s21', 0.10995174365532208, 0.09157621350977088),
    ],
    5: [
        ('s3', 0.2249999999999992),
        ('s21', 0.13239415278850603, 0.47014206410511483),
        ('s21', 0.12593918054482758, 0.10128650732345654),
    ],
    6: [
        ('s21', 0.1167862757263534, 0.24928674517092553),
        ('s21', 0.05084490637020213, 0.06308901449149894),
        ('s111', 0.0828510756183889, 0.05314504984482812, 0.31035245103377235),
    ],
    8: [
        ('s3', 0.14431560767775245),
        ('s21', 0.09509163426730985, 0.45929258829269726),
        ('s21', 0.10321737053471984, 0.17056930775172938),
        ('s21', 0.03245849762320026, 0.05054722831703059),
        ('s111', 0.027230314174426274, 0.008394777409923039, 0.26311282963472254),
    ],
    9: [
        ('s3', 0.09713579628363227),
        ('s21', 0.031334700226399545, 0.4896825191991506),
        ('s21', 0.07782754100511612, 0.43708959149354587),
        ('s21', 0.07964773892720564, 0.18820353561921385),
        ('s21', 0.02557767565867829, 0.044729513394434935),
        ('s111', 0.0432835393773615, 0.036838412054816964, 0.22196298916067184),
    ],
    10: [
        ('s3', 0.09081799038397483),
        ('s21', 0.03672595775605123, 0.4855776333839594),
        ('s21', 0.04532105943544056, 0.10948157548474699),
        ('s111', 0.07275791684585582, 0.14170721941385925, 0.3079398387641987),
        ('s111', 0.028327242530748822, 0.02500353476229676, 0.2466725606391777),
        ('s111', 0.009421666963653645, 0.009540815400336704, 0.06680325101181919),
    ],
    12: [
        ('s21', 0.025731066480424135, 0.48821738971901596),
        ('s21', 0.04369254479159717, 0.4397243922220785),
        ('s21', 0.06285822419732114, 0.27121038500567457),
        ('s21', 0.034796112563261046, 0.12757614501173986),
        ('s21', 0.006166261105541302, 0.02131735056965612),
        ('s111', 0.04037155790744971, 0.11534349448257869, 0.2757132687647058),
        ('s111', 0.022356773113478598, 0.022838332124211692, 0.2813255813572235),
        ('s111', 0.017316231076665984, 0.02573405048367912, 0.11625191620005745),
    ],
}
