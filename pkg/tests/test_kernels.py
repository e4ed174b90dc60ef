import subprocess
import sys
from fractions import Fraction as F

import pytest

from qlattice import kernels
from qlattice.identities import ParamSet, build
from qlattice.latticesum import Window
from qlattice.matinv import check_orthogonality
from qlattice.scalarfield import NumericMode

needs_compiled = pytest.mark.skipif("compiled" not in kernels.available(),
                                    reason="compiled kernel not built")


def test_backend_switching():
    kernels.set_backend("python")
    assert kernels.backend() == "python"
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def _values(identity, params, mode, window):
    built = build(identity, params, mode, check=False)
    with built.field:
        return built.summand.evaluate(Window(window).points(params.r))


RAT, BIG = NumericMode.rational(), NumericMode.bigfloat(40)
CASES = [
    ("cr_8psi8", ParamSet(q=F(3, 10), r=2, a=F(1, 2), b=F(4, 7), d=F(5, 7),
                          cs=(F(2, 3), F(3, 5)), xs=(F(1), F(2, 3)), ks=(1, -1), M=2), 3, BIG),
    ("milne_ar_8phi7", ParamSet(q=F(2, 7), r=3, a=F(3, 5), b=F(5, 11), d=F(7, 13),
                                cs=(F(2, 3), F(3, 4), F(4, 9)), xs=(F(1), F(3, 5), F(5, 8)),
                                M=4), 2, RAT),
    ("milne_ar_8phi7", ParamSet(q=F(2, 7), r=2, a=F(3, 5), b=F(5, 11), d=F(7, 13),
                                cs=(F(2, 3), F(3, 4)), xs=(F(1), F(3, 5)), M=3), 3, BIG),
    ("dr_6psi6_false", ParamSet(q=F(1, 3), r=2, a=F(2, 5), b=F(3, 7), c=F(5, 9), d=F(4, 11),
                                cs=(F(3, 8), F(5, 6)), es=(F(2, 9), F(4, 7)),
                                xs=(F(1), F(2, 3))), 3, BIG),
]


@needs_compiled
@pytest.mark.parametrize("identity,params,window,mode", CASES,
                         ids=[f"{c[0]}-{c[3].name}" for c in CASES])
def test_backends_agree_termwise(identity, params, window, mode):
    kernels.set_backend("python")
    slow = _values(identity, params, mode, window)
    kernels.set_backend("compiled")
    fast = _values(identity, params, mode, window)
    assert slow[1] == fast[1]
    assert [str(u) for u in slow[0]] == [str(u) for u in fast[0]]


@needs_compiled
def test_backends_agree_on_a_windowed_sum():
    p = ParamSet(q=F(1, 3), r=1, a=F(2, 5), b=F(3, 7), c=F(4, 9))
    out = {}
    for name in ("python", "compiled"):
        kernels.set_backend(name)
        rep = check_orthogonality("bmi", p, "left", 1)
        out[name] = [str(c.value) for c in rep.cells]
    assert out["python"] == out["compiled"]


def test_fallback_is_selected_when_extension_is_missing():
    code = ("import sys; sys.modules['qlattice._kernels'] = None\n"
            "from qlattice import kernels\n"
            "assert kernels.available() == ['python'] and kernels.backend() == 'python'\n"
            "from qlattice.scalarfield import qpoch\n"
            "from fractions import Fraction as F\n"
            "assert qpoch(F(3, 10), F(1, 2), 1) == F(7, 10)\n")
    subprocess.run([sys.executable, "-c", code], check=True)
