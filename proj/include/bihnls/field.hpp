#ifndef BIHNLS_FIELD_HPP
#define BIHNLS_FIELD_HPP

// A complex field on the periodic box, holding both lattice views.
//
// Fields are immutable after construction.  Whichever view the constructor
// receives is taken verbatim and the partner view is computed eagerly through
// the unitary transform, so accessors never mutate and a const Field can be
// shared across threads without synchronization.  `origin()` records which
// view was authoritative (the other one carries one transform's rounding).

#include <complex>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bihnls/fft.hpp"
#include "bihnls/grid.hpp"
#include "bihnls/summation.hpp"

namespace bihnls {

enum class SyncState { physical, fourier, both };

inline const char* to_string(SyncState s) {
  switch (s) {
    case SyncState::physical: return "physical";
    case SyncState::fourier: return "fourier";
    default: return "both";
  }
}

class Field {
 public:
  static Field from_physical(std::shared_ptr<const SpectralGrid> grid, cvec phys) {
    check(*grid, phys, "physical");
    cvec four;
    fft_forward(*grid, phys, four);
    return Field(std::move(grid), std::move(phys), std::move(four), SyncState::physical);
  }

  static Field from_fourier(std::shared_ptr<const SpectralGrid> grid, cvec four) {
    check(*grid, four, "fourier");
    cvec phys;
    fft_inverse(*grid, four, phys);
    return Field(std::move(grid), std::move(phys), std::move(four), SyncState::fourier);
  }

  static Field from_physical(const SpectralGrid& grid, cvec phys) {
    return from_physical(std::make_shared<SpectralGrid>(grid), std::move(phys));
  }
  static Field from_fourier(const SpectralGrid& grid, cvec four) {
    return from_fourier(std::make_shared<SpectralGrid>(grid), std::move(four));
  }

  const SpectralGrid& grid() const { return *grid_; }
  std::shared_ptr<const SpectralGrid> grid_ptr() const { return grid_; }
  const cvec& physical() const { return phys_; }
  const cvec& fourier() const { return four_; }
  SyncState origin() const { return origin_; }

  // sum |u|^2 h^N, the squared L2 norm (equals the frequency-side sum by
  // Plancherel; evaluated on the physical view).
  double mass() const {
    KahanSum s;
    const double w = detail::pow_n(grid_->spacing(), grid_->dim());
    for (const auto& v : phys_) s.add(std::norm(v) * w);
    return s.value();
  }

 private:
  Field(std::shared_ptr<const SpectralGrid> grid, cvec phys, cvec four, SyncState origin)
      : grid_(std::move(grid)), phys_(std::move(phys)), four_(std::move(four)), origin_(origin) {}

  static void check(const SpectralGrid& g, const cvec& v, const char* which) {
    if (v.size() != g.size())
      throw std::invalid_argument(std::string("Field: ") + which + " view has " +
                                  std::to_string(v.size()) + " samples, grid expects " +
                                  std::to_string(g.size()));
  }

  std::shared_ptr<const SpectralGrid> grid_;
  cvec phys_, four_;
  SyncState origin_;
};

inline void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (!a.grid().same_extents(b.grid()))
    throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

}  // namespace bihnls

#endif
