#include <doctest.h>

#include <cmath>

#include "scat/grid.hpp"

using namespace scat;

namespace {

Eigen::VectorXd vec1(double x) {
    Eigen::VectorXd v(1);
    v[0] = x;
    return v;
}

WavePacket packet1d(double x, double h) {
    return {vec1(x), vec1(1.0),
            ComplexSymMatrix(Eigen::MatrixXcd::Identity(1, 1)),
            MultiPoly::constant(1, 1.0), 0.0, h};
}

Potential bump1d(double a) { return Potential(1, {{vec1(0.0), 1.0, a}}); }

double gridError(const GridWavefunction& a, const GridWavefunction& b) {
    return (a.values - b.values).norm() / b.values.norm();
}

}  // namespace

TEST_CASE("grid validation") {
    GridWavefunction g{1, 40.0, 4096, 0.1, Eigen::VectorXcd::Zero(4096)};
    CHECK_NOTHROW(g.validate());
    g.n = 1000;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.n = 128;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.n = 4096;
    g.d = 3;
    CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("free solver matches the closed-form free evolution (d = 1)") {
    const WavePacket u0 = packet1d(0.0, 0.1);
    const GridWavefunction g0 = sampleWavePacket(u0, 40.0, 4096);
    const GridWavefunction gT = solve(g0, Potential::free(1), 2.0, 1e-3);
    const GridWavefunction ref =
        sampleWavePacket(freeEvolve(u0, 2.0), 40.0, 4096);
    CHECK(gridError(gT, ref) < 1e-6);
    CHECK(std::abs(gT.norm() - g0.norm()) < 1e-12 * g0.norm());
}

TEST_CASE("free solver matches the closed form (d = 2)") {
    WavePacket u0 = packet1d(0.0, 0.1);
    u0.x = Eigen::Vector2d(0.0, 0.5);
    u0.xi = Eigen::Vector2d(1.0, 0.0);
    u0.gamma = ComplexSymMatrix(Eigen::MatrixXcd::Identity(2, 2));
    u0.poly = MultiPoly::constant(2, 1.0);
    const GridWavefunction g0 = sampleWavePacket(u0, 10.0, 256);
    const GridWavefunction gT = solve(g0, Potential::free(2), 0.5, 1e-3);
    const GridWavefunction ref =
        sampleWavePacket(freeEvolve(u0, 0.5), 10.0, 256);
    CHECK(gridError(gT, ref) < 1e-6);
}

TEST_CASE("solver conservation laws through a bump") {
    const Potential v = bump1d(0.1);
    const GridWavefunction g0 =
        sampleWavePacket(packet1d(-3.0, 0.1), 40.0, 4096);
    const double e0 = energyExpectation(g0, v);
    const GridWavefunction gT = solve(g0, v, 2.0, 1e-3);
    CHECK(std::abs(gT.norm() - g0.norm()) < 1e-12 * g0.norm());
    CHECK(std::abs(energyExpectation(gT, v) - e0) < 1e-8);
}

TEST_CASE("solver is second order in dt") {
    const Potential v = bump1d(0.3);
    const GridWavefunction g0 =
        sampleWavePacket(packet1d(-3.0, 0.1), 40.0, 4096);
    const double dt = 4e-3;
    const GridWavefunction a = solve(g0, v, 4.0, dt);
    const GridWavefunction b = solve(g0, v, 4.0, dt / 2.0);
    const GridWavefunction c = solve(g0, v, 4.0, dt / 4.0);
    const double d1 = (a.values - b.values).norm();
    const double d2 = (b.values - c.values).norm();
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("escaping mass trips the box audit") {
    const GridWavefunction g0 =
        sampleWavePacket(packet1d(0.0, 0.1), 6.0, 256);
    CHECK_THROWS_AS(solve(g0, Potential::free(1), 8.0, 1e-3), BoxTooSmall);
}

TEST_CASE("propagation theorem: error is O(h^{1/2}) through a bump") {
    const Potential v = bump1d(0.3);
    double err[2];
    const double hs[2] = {0.1, 0.05};
    for (int i = 0; i < 2; ++i) {
        const EscapeTimes esc = escapeTimes(vec1(0.0), vec1(1.0), v, 1e-11);
        WavePacket um = packet1d(esc.rhoMinus.x[0], hs[i]);
        const double t = esc.tPlus;  // measured from rhoMinus
        const GridWavefunction ref =
            solve(sampleWavePacket(um, 40.0, 4096), v, t, 2.5e-4);
        const GridWavefunction par =
            sampleWavePacket(propagate(um, t, v, 1e-11), 40.0, 4096);
        err[i] = (ref.values - par.values).norm() / ref.values.norm();
    }
    CHECK(err[0] > err[1]);  // error shrinks with h
    const double ratio = err[0] / err[1];
    CHECK(ratio > 1.25);
    CHECK(ratio < 1.6);
}

TEST_CASE("generalized eigenfunction: free case converges with the "
          "quadrature") {
    const Potential v = Potential::free(1);
    const WavePacket um = packet1d(-3.0, 0.1);
    TimeQuadSpec quad;
    quad.stepFactor = 0.2;
    const double r1 =
        assembleGeneralizedEigenfunction(um, v, {40.0, 4096}, quad).residual;
    quad.stepFactor = 0.1;
    const double r2 =
        assembleGeneralizedEigenfunction(um, v, {40.0, 4096}, quad).residual;
    CHECK(r1 < 1e-3);
    CHECK(r1 / r2 > 3.5);  // at least second order in the quadrature step
}

TEST_CASE("generalized eigenfunction: residual follows the h^{1/2} law") {
    const Potential v = bump1d(0.2);
    double res[2];
    const double hs[2] = {0.2, 0.1};
    for (int i = 0; i < 2; ++i) {
        const EscapeTimes esc = escapeTimes(vec1(0.0), vec1(1.0), v, 1e-11);
        const WavePacket um = packet1d(esc.rhoMinus.x[0], hs[i]);
        res[i] = assembleGeneralizedEigenfunction(um, v, {40.0, 4096}, {})
                     .residual;
    }
    const double ratio = res[0] / res[1];
    CHECK(ratio > 1.16);
    CHECK(ratio < 1.66);
}

TEST_CASE("generalized eigenfunction: far field matches the radiation "
          "profiles") {
    const Potential v = bump1d(0.3);
    const double h = 0.1;
    const EscapeTimes esc = escapeTimes(vec1(0.0), vec1(1.0), v, 1e-11, 2.0);
    const WavePacket um = packet1d(esc.rhoMinus.x[0], h);
    TimeQuadSpec quad;
    quad.tailBackward = 80.0;
    quad.tailForward = 80.0;
    const EigenfunctionResult res =
        assembleGeneralizedEigenfunction(um, v, {80.0, 8192}, quad);

    const WavePacket up = propagate(um, res.tForward, v, 1e-11);
    const SphereProfile fut = farfieldFuture(up);
    const SphereProfile past = farfieldPast(um);
    // In d = 1 the stationary-phase reading of the far field carries a
    // factor (2h)^{(2-d)/2} = sqrt(2h) relative to the profile, and both
    // channels of a right-moving packet oscillate as e^{+ix/h}.
    const Complex futConst = std::sqrt(2.0 * h) *
                             std::exp(Complex(0.0, 0.5 * res.tForward / h)) *
                             fut.evaluate(vec1(1.0));
    const Complex pastConst = std::sqrt(2.0 * h) * past.evaluate(vec1(-1.0));

    double num[2] = {0.0, 0.0}, den[2] = {0.0, 0.0};
    for (int i = 0; i < res.efun.n; ++i) {
        const double x = res.efun.coord(i);
        if (x >= 45.0 && x <= 60.0) {
            const Complex pred = futConst * std::exp(Complex(0.0, x / h));
            num[0] += std::norm(res.efun.values[i] - pred);
            den[0] += std::norm(pred);
        }
        if (x >= -60.0 && x <= -45.0) {
            const Complex pred = pastConst * std::exp(Complex(0.0, x / h));
            num[1] += std::norm(res.efun.values[i] - pred);
            den[1] += std::norm(pred);
        }
    }
    CHECK(std::sqrt(num[0] / den[0]) < 0.05);
    CHECK(std::sqrt(num[1] / den[1]) < 0.05);
}

TEST_CASE("extractPacketParams") {
    SUBCASE("recovers an exact Gaussian packet") {
        WavePacket u = packet1d(1.3, 0.05);
        u.xi = vec1(0.8);
        const PacketParams p =
            extractPacketParams(sampleWavePacket(u, 40.0, 4096));
        CHECK(p.center[0] == doctest::Approx(1.3).epsilon(1e-6));
        CHECK(p.momentum[0] == doctest::Approx(0.8).epsilon(1e-6));
        // |u|^2 ~ e^{-z^2/h}: position variance h/2.
        CHECK(p.cov(0, 0) == doctest::Approx(0.5 * u.h).epsilon(0.01));
    }
    SUBCASE("after a bump crossing, moments track the classical flow") {
        // Mild bump: the packet energy 1/2 sits far above the barrier, so
        // the classically reflected fraction is negligible and the moments
        // follow the flow to O(h).
        const double h = 0.05;
        const Potential v = bump1d(0.1);
        const EscapeTimes esc = escapeTimes(vec1(0.0), vec1(1.0), v, 1e-11);
        const WavePacket um = packet1d(esc.rhoMinus.x[0], h);
        const double t = esc.tPlus;  // measured from rhoMinus
        const GridWavefunction gT =
            solve(sampleWavePacket(um, 40.0, 4096), v, t, 5e-4);
        const PacketParams p = extractPacketParams(gT);
        CHECK(std::abs(p.center[0] - esc.rhoPlus.x[0]) < 3.0 * h);
        CHECK(std::abs(p.momentum[0] - esc.rhoPlus.xi[0]) < 3.0 * h);
        // Predicted position covariance from the transported width matrix.
        const FlowState fs = flowWithFrame(esc.rhoMinus, t, v, 1e-11);
        const ComplexSymMatrix gt = gammaTransport(
            ComplexSymMatrix(Eigen::MatrixXcd::Identity(1, 1)), fs.frame);
        const double pred = 0.5 * h / gt.mat().real()(0, 0);
        CHECK(p.cov(0, 0) / pred == doctest::Approx(1.0).epsilon(0.1));
    }
    SUBCASE("separated peaks are rejected") {
        const WavePacket a = packet1d(-6.0, 0.05), b = packet1d(6.0, 0.05);
        GridWavefunction g = sampleWavePacket(a, 40.0, 4096);
        g.values += sampleWavePacket(b, 40.0, 4096).values;
        CHECK_THROWS_AS(extractPacketParams(g), Multimodal);
    }
}
