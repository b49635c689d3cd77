#pragma once

#include <string>
#include <vector>

#include "selflow/dynamics.hpp"

namespace selflow {

/// Components (xx, xy, yy) of grad d (.) grad d - 1/2 |grad d|^2 I, i.e.
/// (1/2 (|d_1 d|^2 - |d_2 d|^2), <d_1 d, d_2 d>, -xx).
Field<3> traceless_stress(const DirectorField& d);

/// Divergence-free velocity test function.
struct VelocityTest {
    std::string name;
    VectorField phi;
};

/// Director test function.
struct DirectorTest {
    std::string name;
    DirectorField psi;
};

/// phi = (D_y s, -D_x s) with the central differences of the projection, so
/// projection_divergence(phi) vanishes identically. On bounded grids s must
/// vanish near the boundary; phi is zeroed on the boundary ring.
template <class F>
VelocityTest stream_test(const Grid& grid, std::string name, F&& stream);

VelocityTest stream_test_from(const ScalarField& stream, std::string name);

/// Three fixed divergence-free test functions suited to the grid.
std::vector<VelocityTest> default_velocity_tests(const Grid& grid);
std::vector<DirectorTest> default_director_tests(const Grid& grid);

/// sum_ij <T_ij, d_j phi_i> with T = traceless_stress(d). Throws ArgumentError
/// if phi is not divergence-free within tol.
double stress_pairing(const DirectorField& d, const VelocityTest& phi, double tol = 1e-10);

/// Pairing with a precomputed traceless stress and test-function gradient.
double stress_pairing(const Field<3>& traceless, const FieldGradient<2>& grad_phi);

/// stress_pairing() split into its diagonal and off-diagonal contributions.
struct PairingParts {
    double diagonal = 0.0;      ///< int T_xx (d_1 phi_1 - d_2 phi_2)
    double off_diagonal = 0.0;  ///< int T_xy (d_2 phi_1 + d_1 phi_2)
};
PairingParts stress_pairing_parts(const DirectorField& d, const VectorField& phi);

/// Time-integrated weak forms along one path.
///
/// For a divergence-free phi and any psi,
///   R_u = <u(t) - u0, phi> - int_0^t [<u (x) u, grad phi> + mu <u, lap phi>
///            + lambda <T(d), grad phi>] ds - xi1 int <phi, S(u) dW1>
///   R_d = <d(t) - d0, psi> - int_0^t [<u (x) d, grad psi> + gamma <d, lap psi>
///            - gamma <f_eps(d), psi> + xi2^2/2 <(d x h) x h, psi>] ds
///            - xi2 int <psi, d x h> dW2
/// with left-endpoint sums. At finite eps the harmonic-map term |grad d|^2 d
/// is represented by -f_eps(d).
class WeakFormTracker {
public:
    WeakFormTracker(const SimState& initial, const Params& params, const MagneticField& h,
                    std::vector<VelocityTest> u_tests, std::vector<DirectorTest> d_tests);

    /// Accumulate one step taken from state s with increments inc.
    void observe(const SimState& s, const Increments& inc, const NoiseOperator& noise);

    std::vector<double> residual_u(const SimState& now) const;
    std::vector<double> residual_d(const SimState& now) const;

    const std::vector<VelocityTest>& u_tests() const noexcept { return u_tests_; }
    const std::vector<DirectorTest>& d_tests() const noexcept { return d_tests_; }

private:
    Params p_;
    DirectorField h_;
    VectorField u0_;
    DirectorField d0_;
    std::vector<VelocityTest> u_tests_;
    std::vector<DirectorTest> d_tests_;
    std::vector<FieldGradient<2>> grad_phi_;
    std::vector<VectorField> lap_phi_;
    std::vector<FieldGradient<3>> grad_psi_;
    std::vector<DirectorField> lap_psi_;
    std::vector<double> acc_u_, acc_d_;
};

template <class F>
VelocityTest stream_test(const Grid& grid, std::string name, F&& stream) {
    return stream_test_from(ScalarField::from_function(grid,
                                                       [&](double x, double y) {
                                                           return Vec<1>{stream(x, y)};
                                                       }),
                            std::move(name));
}

}  // namespace selflow
