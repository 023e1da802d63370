#pragma once

#include <functional>

#include "mfg/catalog.hpp"
#include "mfg/grid.hpp"

namespace mfg {

/// x ↦ G(x, m) on the grid, with optional flat derivatives in m and x0-derivatives.
struct MeasureFunctional {
    using Value = std::function<GridFunction(const GridDensity&)>;
    using Flat = std::function<GridFunction(const GridDensity&, const GridSignedMeasure&)>;
    using Flat2 = std::function<GridFunction(const GridDensity&, const GridSignedMeasure&,
                                             const GridSignedMeasure&)>;

    Value value;
    Flat flat;    ///< δG/δm(x, m)(ρ), linear in ρ
    Flat2 flat2;  ///< δ²G/δm²(x, m)(ρ, ρ')
    Value dx0;
    Value dx0x0;
    Flat dx0Flat;

    GridFunction operator()(const GridDensity& m) const { return value(m); }
    [[nodiscard]] const Flat& requireFlat(const char* where) const;
    [[nodiscard]] const Flat2& requireFlat2(const char* where) const;
};

/// G(x0, ·, ·) of the catalog as a functional of (x, m).
MeasureFunctional terminalFunctional(const CatalogTerminal& G, double x0);

}  // namespace mfg
