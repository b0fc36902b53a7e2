#include <doctest.h>

#include <cmath>

#include "erasim/fock.hpp"
#include "erasim/rng.hpp"

using namespace erasim;

TEST_CASE("annihilation ladder action") {
    const FockSpace space(4);
    const Mat a = annihilation(space);

    const Ket two = Ket::fock(space, 2);
    const Vec lowered = a * two.amplitudes();
    CHECK(std::abs(lowered(1) - std::sqrt(2.0)) < 1e-14);
    CHECK(lowered(0) == Complex(0.0));
    CHECK(lowered(2) == Complex(0.0));

    const Vec vac = a * Ket::fock(space, 0).amplitudes();
    CHECK(vac.norm() == 0.0);
}

TEST_CASE("commutator [a, a^dag] is identity on the retained levels") {
    const FockSpace space(6);
    const Mat a = annihilation(space);
    const Mat comm = a * a.adjoint() - a.adjoint() * a;
    // the top level carries the truncation artifact; all below are exact
    for (int n = 0; n < space.dim - 1; ++n) CHECK(std::abs(comm(n, n) - 1.0) < 1e-14);
}

TEST_CASE("parity operator") {
    const FockSpace space(4);
    const Mat p = parity_op(space);
    CHECK(p(0, 0) == Complex(1.0));
    CHECK(p(1, 1) == Complex(-1.0));
    CHECK(p(2, 2) == Complex(1.0));
    CHECK(p(3, 3) == Complex(-1.0));

    CHECK((p * p - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

    CHECK(expectation(p, DensityMatrix::pure(Ket::fock(space, 2))) == doctest::Approx(1.0));
    Vec v(4);
    v << 1.0, 1.0, 0.0, 0.0;
    CHECK(expectation(p, DensityMatrix::pure(Ket(v))) == doctest::Approx(0.0));
}

TEST_CASE("displacement basics") {
    const FockSpace space(30);

    CHECK((displacement(Complex(0.0), space) - Mat::Identity(30, 30)).cwiseAbs().maxCoeff() <
          1e-14);

    const Mat d = displacement(Complex(1.0), space);
    const Mat dm = displacement(Complex(-1.0), space);
    CHECK((d * dm - Mat::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-10);

    // coherent overlap <0|D(alpha)|0> = exp(-|alpha|^2 / 2)
    CHECK(std::abs(d(0, 0) - std::exp(-0.5)) < 1e-10);
}

TEST_CASE("displacement unitarity within truncation") {
    // dim >= ceil(8 |alpha|^2 + 12) keeps the defect below 1e-8
    CounterRng rng(11, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const double re = 3.0 * (rng.next_double() - 0.5);
        const double im = 3.0 * (rng.next_double() - 0.5);
        const Complex alpha(re, im);
        const int dim = static_cast<int>(std::ceil(8.0 * std::norm(alpha) + 12.0));
        double defect = 0.0;
        displacement(alpha, FockSpace(dim), &defect);
        CHECK(defect < 1e-8);
    }
}

TEST_CASE("displaced parity") {
    const FockSpace space(30);
    CHECK((displaced_parity(Complex(0.0), space) - parity_op(space)).cwiseAbs().maxCoeff() <
          1e-13);

    // vacuum at alpha = 1: <P> = exp(-2)
    const DensityMatrix vac = DensityMatrix::pure(Ket::fock(space, 0));
    CHECK(std::abs(expectation(displaced_parity(Complex(1.0), space), vac) - std::exp(-2.0)) <
          1e-8);

    CounterRng rng(5, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const Complex alpha(1.5 * (rng.next_double() - 0.5) * 2.0,
                            1.5 * (rng.next_double() - 0.5) * 2.0);
        const Mat p = displaced_parity(alpha, space);
        CHECK(hermiticity_defect(p) < 1e-9);
        Eigen::SelfAdjointEigenSolver<Mat> es(p);
        CHECK(es.eigenvalues().minCoeff() > -1.0 - 1e-8);
        CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-8);
    }
}

TEST_CASE("density matrix invariants") {
    const FockSpace space(4);
    const DensityMatrix rho = DensityMatrix::maximally_mixed(space);
    CHECK(rho.trace() == doctest::Approx(1.0));
    CHECK(rho.physicality_defect() < 1e-12);

    Mat bad = Mat::Identity(4, 4);
    CHECK_THROWS_AS(DensityMatrix::from_matrix(bad), std::invalid_argument);

    Mat nonherm = Mat::Zero(4, 4);
    nonherm(0, 0) = 1.0;
    nonherm(0, 1) = 0.5;
    CHECK_THROWS_AS(DensityMatrix::from_matrix(nonherm), std::invalid_argument);

    CHECK_THROWS_AS(FockSpace(1), std::invalid_argument);
    CHECK_THROWS_AS(Ket::fock(space, 7), std::invalid_argument);
}

TEST_CASE("eigenvalue sum of physical states is one") {
    CounterRng rng(3, 0);
    const FockSpace space(5);
    for (int trial = 0; trial < 25; ++trial) {
        // random pure-state mixture
        Mat m = Mat::Zero(5, 5);
        for (int k = 0; k < 3; ++k) {
            Vec v(5);
            for (int i = 0; i < 5; ++i) v(i) = Complex(rng.normal(), rng.normal());
            v.normalize();
            m += (1.0 / 3.0) * v * v.adjoint();
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(m);
        CHECK(std::abs(es.eigenvalues().sum() - 1.0) < 1e-10);
        CHECK(es.eigenvalues().minCoeff() > -1e-9);
    }
}
