#ifndef DETMAC_CORRELATION_HPP
#define DETMAC_CORRELATION_HPP

#include <array>
#include <vector>

#include "detmac/hermitian.hpp"
#include "detmac/system.hpp"

namespace detmac {

/// Antenna positions in meters plus the carrier wavelength.
struct AntennaArray {
    std::vector<std::array<double, 3>> positions;
    double wavelength = 0.0;

    int size() const { return static_cast<int>(positions.size()); }
    void validate() const;
};

/// Horizontal sector of signal propagation. When theta_max is numerically
/// below theta_min the arc wraps: it runs counterclockwise from theta_min to
/// theta_max + 2*pi.
struct AngularSpread {
    double theta_min = 0.0;
    double theta_max = 0.0;

    /// Arc length in (0, 2*pi].
    double arc_length() const;
    /// Upper integration endpoint after unwrapping.
    double unwrapped_max() const;
    void validate() const;
};

enum class CorrelationSide { transmit, receive };

/// Hermitian correlation matrix with unit diagonal and trace equal to its
/// dimension.
struct CorrelationMatrix {
    HermitianMatrix matrix;
    CorrelationSide side = CorrelationSide::transmit;
};

/// Jakes-type correlation over a horizontal sector: entry (a, b) is the
/// sector average of exp(i (2*pi/lambda) (x_a - x_b) . u(theta)) with
/// u(theta) the horizontal unit direction, which reduces to the scalar
/// exp(i (2*pi/lambda) ||x_a - x_b|| cos(theta)) form on a linear array. The
/// diagonal is exactly one and the lower triangle follows by conjugation.
/// Real and imaginary parts are integrated separately by adaptive quadrature
/// to absolute tolerance 1e-10. Entries are computed in parallel when OpenMP
/// is enabled; jakes_correlation_serial is the single-threaded reference.
CorrelationMatrix jakes_correlation(const AntennaArray& array, const AngularSpread& spread,
                                    CorrelationSide side = CorrelationSide::transmit);
CorrelationMatrix jakes_correlation_serial(const AntennaArray& array, const AngularSpread& spread,
                                           CorrelationSide side = CorrelationSide::transmit);

/// Regular lattice of nx * ny * nz antennas with the given spacing.
AntennaArray grid_array(int nx, int ny, int nz, double spacing, double wavelength);

enum class ArrayGeometry { linear, cubic };

/// The two-user configuration used throughout the experiments: sectors
/// (0, pi) and (pi/3, 4*pi/3) on the transmit side, (2*pi/3, -2*pi/3) and
/// (pi, 0) on the receive side, with N = n_1 = n_2 = n antennas per device on
/// a linear or cubic lattice. Noise power and budgets default to one; cubic
/// geometry requires n to be a perfect cube.
SystemConfig scenario_two_user(int n, double spacing, double wavelength,
                               ArrayGeometry geometry = ArrayGeometry::linear);

}  // namespace detmac

#endif
