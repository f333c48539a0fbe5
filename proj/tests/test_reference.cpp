// Values frozen from tests/oracles/reference_values.py, an independent
// NumPy/SciPy model integrated with DOP853 at rtol 1e-11.
#include <doctest.h>

#include <vector>

#include "cavityw/experiments.hpp"

using namespace cavityw;
using doctest::Approx;

namespace {

TransferRecord lindblad_point(double crosstalk, double r = 1.0) {
    SystemRecipe recipe;
    recipe.crosstalk_multiple = crosstalk;
    recipe.r = r;
    TransferOptions opt;
    opt.evolve.control.tolerance = 1e-10;
    return run_transfer(recipe, opt).record;
}

void check_photons(const TransferRecord& rec, const std::vector<double>& expected) {
    REQUIRE(rec.mean_photons.size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) CHECK(rec.mean_photons[k] == Approx(expected[k]).epsilon(1e-5));
}

}  // namespace

TEST_CASE("cavity order") {
    SystemRecipe recipe;
    TransferOptions opt;
    opt.evolve.samples = 3;
    CHECK(run_transfer(recipe, opt).record.cavities ==
          std::vector<std::string>{"c1", "c2", "c3", "c1'", "c2'", "c3'"});
}

TEST_CASE("master equation without crosstalk") {
    const auto rec = lindblad_point(0.0);
    CHECK(rec.fidelity == Approx(0.9816449680559252).epsilon(1e-7));
    check_photons(rec, {0.005489168555318123, 0.0028389405894239878, 0.0019190891128761224, 0.002152761674984596,
                        0.0011323426339629448, 0.0007634483435100219});
}

TEST_CASE("master equation with weak crosstalk") {
    const auto rec = lindblad_point(0.01);
    CHECK(rec.fidelity == Approx(0.9812392793362031).epsilon(1e-7));
    CHECK(rec.fidelity_squared == Approx(rec.fidelity * rec.fidelity).epsilon(1e-12));
    check_photons(rec, {0.005232208536702504, 0.0027044749912340997, 0.0018283573493522963, 0.002383911722101967,
                        0.001263324388810643, 0.0008546940980707013});
}

TEST_CASE("master equation with strong crosstalk") {
    const auto rec = lindblad_point(0.1);
    CHECK(rec.fidelity == Approx(0.9781222996874718).epsilon(1e-7));
    check_photons(rec, {0.003505437642966759, 0.001848730035694461, 0.001275572970524144, 0.003920239486748651,
                        0.002078794304792773, 0.001416863194799998});
}

TEST_CASE("broken matching") {
    CHECK(lindblad_point(0.01, 0.9).fidelity == Approx(0.9706155562112505).epsilon(1e-7));
    CHECK(lindblad_point(0.01, 1.1).fidelity == Approx(0.9688734777683401).epsilon(1e-7));
}

TEST_CASE("closed single pair on the unrestricted basis") {
    SystemRecipe recipe;
    recipe.n = 1;
    recipe.sector_emax.reset();
    recipe.dissipation = false;
    TransferOptions opt;
    opt.evolve.control.tolerance = 1e-10;
    opt.evolve.samples = 11;
    const auto rec = run_transfer(recipe, opt).record;
    CHECK(recipe.basis()->dimension() == 108);
    CHECK(rec.fidelity == Approx(0.9752096051028858).epsilon(1e-5));
}
