#include "recell/quadrature.hpp"

namespace recell {
namespace gk {

// Kronrod-15 extension of Gauss-7, nonnegative abscissae
const double kx[8] = {
    0.000000000000000000, 0.207784955007898468, 0.405845151377397167,
    0.586087235467691130, 0.741531185599394440, 0.864864423359769073,
    0.949107912342758525, 0.991455371120812639,
};

const double kw[8] = {
    0.209482141084727828, 0.204432940075298892, 0.190350578064785410,
    0.169004726639267903, 0.140653259715525919, 0.104790010322250184,
    0.063092092629978553, 0.022935322010529225,
};

// embedded Gauss-7 weights for kx[0], kx[2], kx[4], kx[6]
const double gw[4] = {
    0.417959183673469388, 0.381830050505118945, 0.279705391489276668,
    0.129484966168869693,
};

}  // namespace gk
}  // namespace recell
