#include "finpart/residue.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace finpart {
namespace {

void require_single_even(const Layout& layout) {
  if (layout.block_count() != 1 || layout.block(0).first != 0)
    throw InvalidArgument("residue needs a single normal block starting at x_1");
  if (layout.codim() % 2 != 0) throw InvalidArgument("residue needs even codimension");
}

bool on_normal(const Layout& layout, const WindowFactor& f) {
  return f.arg == WindowFactor::Arg::Radial || layout.block_of(f.index) >= 0;
}

// Splits off the terms carrying a derivative of a normal window; they vanish
// near Y.
Form split_remote(const Form& eta, Form* remote) {
  const Layout& layout = eta.layout();
  Form local(layout);
  *remote = Form(layout);
  for (const auto& [key, p] : eta.terms()) {
    const bool far = std::any_of(key.windows.begin(), key.windows.end(),
                                 [&](const WindowFactor& f) { return on_normal(layout, f) && f.window.order > 0; });
    (far ? *remote : local).add_term(key.frame, key.windows, p);
  }
  return local;
}

// Termwise division of the coefficients by mu_0^k; the remainder collects
// the non-divisible parts.
Form divide_form(const Form& eta, int k, Form* remainder) {
  const Layout& layout = eta.layout();
  const std::vector<int> normal = layout.block_coords(0);
  Form q(layout);
  *remainder = Form(layout);
  for (const auto& [key, p] : eta.terms()) {
    Polynomial cur = p;
    for (int i = 0; i < k; ++i) {
      Polynomial rem;
      Polynomial next = divide_by_sum_of_squares(cur, normal, &rem);
      if (!rem.is_zero()) {
        remainder->add_term(key.frame, key.windows, rem);
        break;
      }
      cur = std::move(next);
    }
    q.add_term(key.frame, key.windows, cur);
  }
  return q;
}

// Numerator over mu_0^r of the germ of omega at Y, or the obstruction to it.
Form normalized(const Form& eta, int power, int r, Form* obstruction) {
  *obstruction = Form(eta.layout());
  if (power <= r) {
    Form out = eta;
    const Polynomial mu = mu_polynomial(eta.layout());
    for (int k = power; k < r; ++k) out *= mu;
    return out;
  }
  return divide_form(eta, power - r, obstruction);
}

}  // namespace

TameReport tame_check(const SingularForm& omega) {
  const Layout& layout = omega.layout();
  require_single_even(layout);
  TameReport rep;
  rep.r = layout.codim() / 2;
  const int N = omega.power();
  const Form eta = split_remote(omega.numerator(), &rep.remote);
  // mu^r omega = mu^{r-N} eta.
  Form obstruction;
  Form smooth = normalized(eta, N, rep.r, &obstruction);
  if (!obstruction.is_zero()) {
    rep.reason = "mu_0^r omega is not smooth: numerator not divisible by mu_0^" + std::to_string(N - rep.r);
    rep.obstruction = obstruction;
    return rep;
  }
  // mu^{r-1} d mu ^ omega = mu^{r-1-N} d mu ^ eta.
  const Form dm_eta = wedge(d_mu(layout), eta);
  Form log_part = N <= rep.r - 1 ? normalized(dm_eta, N, rep.r - 1, &obstruction)
                                 : divide_form(dm_eta, N - rep.r + 1, &obstruction);
  if (!obstruction.is_zero()) {
    rep.reason = "mu_0^(r-1) d mu_0 ^ omega is not smooth: d mu_0 ^ numerator not divisible by mu_0^" +
                 std::to_string(N - rep.r + 1);
    rep.obstruction = obstruction;
    return rep;
  }
  rep.tame = true;
  rep.smooth_part = std::move(smooth);
  rep.log_part = std::move(log_part);
  return rep;
}

SingularForm TameDecomposition::reconstruct() const {
  const Layout& layout = alpha.layout();
  Form out(layout);
  Form vol = Form::scalar(layout, Polynomial::constant(layout.dimension(), 1.0));
  for (int i : layout.block_coords(0)) vol = wedge(vol, Form::differential(layout, i));
  out += wedge(vol, alpha);
  for (const auto& [i, a] : correction) out += Polynomial::variable(layout.dimension(), i) * a;
  return SingularForm(0, std::move(out)) + remote;
}

TameDecomposition varia_decompose(const SingularForm& omega) {
  const TameReport rep = tame_check(omega);
  if (!rep.tame) throw InvalidArgument("varia_decompose needs a tame form: " + rep.reason);
  const Layout& layout = omega.layout();
  const int n = layout.dimension();
  const std::vector<int> normal = layout.block_coords(0);
  const Frame block = frame_of(normal);
  TameDecomposition dec;
  dec.alpha = Form(layout);
  const int N = omega.power();
  Form remote = rep.remote;
  const Polynomial mu = mu_polynomial(layout);
  for (int k = N; k < rep.r; ++k) remote *= mu;
  dec.remote = SingularForm(std::max(0, N - rep.r), std::move(remote));
  std::vector<Form> slots(normal.size(), Form(layout));
  for (const auto& [key, p] : rep.smooth_part.terms()) {
    if ((key.frame & block) == block) {
      // Normal indices come first, so dx^frame = dx_N ^ dx^rest.
      dec.alpha.add_term(key.frame & ~block, key.windows, p);
      continue;
    }
    for (const auto& [e, c] : p.terms()) {
      std::size_t slot = normal.size();
      for (std::size_t k = 0; k < normal.size(); ++k)
        if (e[normal[k]] > 0) {
          slot = k;
          break;
        }
      if (slot == normal.size())
        throw NumericalFailure("tame form has a term not vanishing on Y outside the normal volume");
      MultiIndex q = e;
      q[normal[slot]] -= 1;
      slots[slot].add_term(key.frame, key.windows, Polynomial::monomial(n, q, c));
    }
  }
  for (std::size_t k = 0; k < normal.size(); ++k)
    if (!slots[k].is_zero()) dec.correction.emplace_back(normal[k], std::move(slots[k]));
  return dec;
}

double residue_constant(int m) {
  if (m < 2 || m % 2 != 0) throw InvalidArgument("residue constant needs even m >= 2");
  const int r = m / 2;
  return 2.0 * std::pow(std::numbers::pi, r) / std::tgamma(static_cast<double>(r));
}

ResidueForm residue_map(const SingularForm& omega) {
  const TameDecomposition dec = varia_decompose(omega);
  ResidueForm R;
  R.codim = omega.codim();
  R.form = restrict_to_Y(dec.alpha) * Complex(residue_constant(R.codim));
  return R;
}

SingularForm bilogarithmic_form(const Form& w11, const Form& w10, const Form& w01, const Form& w00) {
  const Layout& layout = w11.layout();
  if (!(w10.layout() == layout && w01.layout() == layout && w00.layout() == layout))
    throw InvalidArgument("bilogarithmic components must share one layout");
  if (layout.block_count() != 1 || layout.block(0).first != 0 || layout.codim() != 2)
    throw InvalidArgument("bilogarithmic form needs the normal block {x_1, x_2}");
  const int n = layout.dimension();
  const Complex I(0.0, 1.0);
  const Polynomial x1 = Polynomial::variable(n, 0);
  const Polynomial x2 = Polynomial::variable(n, 1);
  const Form dx1 = Form::differential(layout, 0);
  const Form dx2 = Form::differential(layout, 1);
  // dz/z = zbar dz / mu, dzbar/zbar = z dzbar / mu, dz ^ dzbar = -2i dx1 ^ dx2.
  const Form dz = dx1 + I * dx2;
  const Form dzbar = dx1 - I * dx2;
  Form num = wedge(Complex(0.0, -2.0) * wedge(dx1, dx2), w11);
  num += (x1 - I * x2) * wedge(dz, w10);
  num += (x1 + I * x2) * wedge(dzbar, w01);
  num += mu_polynomial(layout) * w00;
  return SingularForm(1, std::move(num));
}

ResidueForm residue_complex(const Form& w11, const Form& w10, const Form& w01, const Form& w00) {
  bilogarithmic_form(w11, w10, w01, w00);  // validates the layout
  ResidueForm R;
  R.codim = 2;
  R.form = restrict_to_Y(w11) * Complex(0.0, -4.0 * std::numbers::pi);
  return R;
}

Complex pair_on_Y(const ResidueForm& R, const Form& phi, int order) {
  const Layout& layout = R.form.layout();
  if (!(phi.layout() == layout)) throw InvalidArgument("residue and test form live on different layouts");
  const std::vector<int> base = layout.base_coords();
  const Frame top = frame_of(base);
  const Form prod = wedge(R.form, restrict_to_Y(phi));
  Complex sum{};
  for (const auto& [key, p] : prod.terms()) {
    if (key.frame != top)
      throw InvalidArgument("pair_on_Y: R ^ phi|_Y has degree " + std::to_string(frame_degree(key.frame)) +
                            ", base dimension is " + std::to_string(base.size()));
    std::vector<std::vector<Window>> windows(base.size());
    for (const WindowFactor& f : key.windows) {
      const auto it = std::find(base.begin(), base.end(), f.index);
      if (f.arg != WindowFactor::Arg::Coordinate || it == base.end())
        throw InvalidArgument("pair_on_Y: form on Y carries a normal window");
      windows[static_cast<std::size_t>(it - base.begin())].push_back(f.window);
    }
    sum += base_integral(p, base, windows, order);
  }
  return sum * static_cast<double>(R.orientation);
}

}  // namespace finpart
