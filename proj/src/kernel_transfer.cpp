#include "immunokinetics/kernel_transfer.hpp"

namespace immunokinetics {

namespace {
std::size_t row_offset(std::size_t i) { return i * (i + 1) / 2; }
}  // namespace

BoostingTransfer::BoostingTransfer(const BoostingKernel& kernel, const ImmunityGrid& grid) {
  const std::size_t m = grid.size();
  const std::size_t top = m - 1;
  widths_.resize(m);
  stay_.resize(m);
  to_top_.resize(m);
  has_continuous_ = kernel.has_continuous_part();
  if (has_continuous_) lower_.assign(row_offset(top), 0.0);

  for (std::size_t j = 0; j < m; ++j) widths_[j] = grid.width(j);
  for (std::size_t j = 0; j < m; ++j) {
    const KernelMasses masses = kernel_cell_masses(kernel, grid.center(j), grid);
    stay_[j] = masses.stay;
    to_top_[j] = masses.at_zmax + masses.per_cell[top];
    if (!has_continuous_) continue;
    for (std::size_t i = j; i < top; ++i) {
      lower_[row_offset(i) + j] = masses.per_cell[i] * widths_[j] / widths_[i];
    }
  }
}

void BoostingTransfer::interior_gain(std::span<const double> r, std::span<double> gain) const {
  const std::size_t m = size();
  const std::size_t top = m - 1;
  gain[top] = 0.0;
  if (!has_continuous_) {
    for (std::size_t i = 0; i < top; ++i) gain[i] = 0.0;
    return;
  }
  for (std::size_t i = 0; i < top; ++i) {
    const double* row = lower_.data() + row_offset(i);
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += row[j] * r[j];
    gain[i] = acc;
  }
}

double BoostingTransfer::boundary_mass(std::span<const double> r) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < size(); ++j) acc += to_top_[j] * r[j] * widths_[j];
  return acc;
}

std::vector<double> BoostingTransfer::apply(std::span<const double> r) const {
  std::vector<double> out(size());
  interior_gain(r, out);
  for (std::size_t i = 0; i < size(); ++i) out[i] += stay_[i] * r[i];
  out.back() += boundary_mass(r) / widths_.back();
  return out;
}

}  // namespace immunokinetics
