#pragma once

#include <string>
#include <utility>
#include <vector>

#include "finpart/exterior.hpp"
#include "finpart/quadrature.hpp"

namespace finpart {

// Tameness of omega = mu_0^{-N} eta for m = 2r: mu_0^r omega and
// mu_0^{r-1} d mu_0 ^ omega are smooth. Windows are read as germs at Y:
// order-0 radial windows equal 1 there and terms carrying a derivative of a
// normal window vanish near Y, so they are set aside as `remote`.
struct TameReport {
  bool tame = false;
  int r = 0;
  Form smooth_part;  // numerator of mu_0^r omega (germ at Y), when smooth
  Form log_part;     // numerator of mu_0^{r-1} d mu_0 ^ omega, when smooth
  Form obstruction;  // non-divisible remainder of the failing condition
  std::string reason;
  Form remote;  // terms vanishing near Y, excluded from the analysis
};

TameReport tame_check(const SingularForm& omega);

// mu_0^{m/2} omega = dx_1 ^ ... ^ dx_m ^ alpha + sum_i x_i alpha_i + remote
// with remote vanishing near Y.
struct TameDecomposition {
  Form alpha;
  std::vector<std::pair<int, Form>> correction;  // (i, alpha_i), 0-based i
  SingularForm remote;                            // mu_0^r times the remote terms

  // dx_N ^ alpha + sum_i x_i alpha_i + remote.
  SingularForm reconstruct() const;
};

TameDecomposition varia_decompose(const SingularForm& omega);

// A form on Y: no dependence on the normal coordinates and no normal
// differentials. Fibre orientation dx_1..dx_m and base orientation
// dx_{m+1}..dx_n; `orientation` records the sign of that convention.
struct ResidueForm {
  Form form;
  int codim = 0;
  int orientation = 1;
};

// 2 pi^r / (r-1)! for m = 2r.
double residue_constant(int m);

// R(omega) = residue_constant(m) * alpha|_Y.
ResidueForm residue_map(const SingularForm& omega);

// omega = (dz/z) ^ (dzbar/zbar) ^ w11 + (dz/z) ^ w10 + (dzbar/zbar) ^ w01 + w00
// with z = x_1 + i x_2, as a real singular form over mu_0.
SingularForm bilogarithmic_form(const Form& w11, const Form& w10, const Form& w01, const Form& w00);

// R = -4 pi i w11|_Y.
ResidueForm residue_complex(const Form& w11, const Form& w10, const Form& w01, const Form& w00);

// int_Y R ^ phi|_Y in the base orientation.
Complex pair_on_Y(const ResidueForm& R, const Form& phi, int order = kDefaultGaussOrder);

}  // namespace finpart
