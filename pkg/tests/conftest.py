import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tqc import _kernels, _pykernels
from tqc.curves import ClosedCurve
from tqc.generators import CurveSpec, generate

settings.register_profile("tqc", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("tqc")

BACKENDS = [pytest.param(_pykernels, id="python")]
if _kernels.BACKEND == "cython":
    from tqc import _ckernels
    BACKENDS.append(pytest.param(_ckernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture(scope="session")
def circle512():
    return generate(CurveSpec("circle", 512))


@pytest.fixture(scope="session")
def koch4():
    return generate(CurveSpec("koch", params={"level": 4}))


@pytest.fixture
def unit_square():
    return ClosedCurve(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


@pytest.fixture(scope="session")
def circle_map(circle512):
    from tqc.conformal.zipper import zipper_fit
    return zipper_fit(circle512)


@pytest.fixture(scope="session")
def ellipse_map():
    from tqc.conformal.zipper import zipper_fit
    return zipper_fit(generate(CurveSpec("ellipse", 256)))
