#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "genfun/errors.hpp"
#include "genfun/util.hpp"

namespace genfun {

using Complex = std::complex<double>;

// Multi-index of a Fourier mode; the second entry is 0 for one-dimensional fields.
using Mode = std::array<int, 2>;

// Extra non-periodic direction attached to each Fourier coefficient.
enum class Transverse { none, chebyshev_y, grid_v };

inline std::string transverse_name(Transverse k) {
    switch (k) {
        case Transverse::none: return "none";
        case Transverse::chebyshev_y: return "chebyshev_y";
        case Transverse::grid_v: return "grid_v";
    }
    return "none";
}

inline Transverse transverse_from_name(const std::string& s) {
    if (s == "none") return Transverse::none;
    if (s == "chebyshev_y") return Transverse::chebyshev_y;
    if (s == "grid_v") return Transverse::grid_v;
    throw ConfigError("unknown transverse kind '" + s + "'");
}

// Dense block of Fourier coefficients on the box |alpha|_inf <= N, with an
// optional vector of components and an optional transverse sampling axis.
// Storage order: component (outer), mode in lexicographic order, node (inner).
class SpectralField {
public:
    SpectralField(int dim, int trunc, int components = 1,
                  Transverse kind = Transverse::none,
                  std::vector<double> nodes = {})
        : dim_(dim), trunc_(trunc), components_(components), kind_(kind),
          nodes_(std::move(nodes)) {
        if (dim_ != 1 && dim_ != 2)
            throw DimensionMismatch("field dimension must be 1 or 2, got " + std::to_string(dim_));
        if (trunc_ < 0)
            throw IndexOutOfTruncation("truncation level must be nonnegative");
        if (components_ < 1)
            throw DimensionMismatch("field needs at least one component");
        if (kind_ == Transverse::none && !nodes_.empty())
            throw DimensionMismatch("node list supplied for a purely periodic field");
        if (kind_ != Transverse::none && nodes_.empty())
            throw DimensionMismatch("transverse field needs a node list");
        data_.assign(static_cast<size_t>(components_) * mode_count() * node_count(),
                     Complex(0.0, 0.0));
    }

    int dim() const { return dim_; }
    int trunc() const { return trunc_; }
    int components() const { return components_; }
    Transverse kind() const { return kind_; }
    const std::vector<double>& nodes() const { return nodes_; }
    int side() const { return 2 * trunc_ + 1; }
    size_t mode_count() const {
        size_t s = static_cast<size_t>(side());
        return dim_ == 1 ? s : s * s;
    }
    int node_count() const {
        return kind_ == Transverse::none ? 1 : static_cast<int>(nodes_.size());
    }

    bool real_valued() const { return real_valued_; }
    void set_real_valued(bool v) { real_valued_ = v; }

    size_t mode_index(const Mode& a) const {
        if (dim_ == 1) return static_cast<size_t>(a[0] + trunc_);
        return static_cast<size_t>(a[0] + trunc_) * side() + static_cast<size_t>(a[1] + trunc_);
    }

    bool in_box(const Mode& a) const {
        if (std::abs(a[0]) > trunc_) return false;
        if (dim_ == 2) return std::abs(a[1]) <= trunc_;
        return a[1] == 0;
    }

    Complex& at(const Mode& a, int comp = 0, int node = 0) {
        check_access(a, comp, node);
        return data_[offset(mode_index(a), comp, node)];
    }

    const Complex& at(const Mode& a, int comp = 0, int node = 0) const {
        check_access(a, comp, node);
        return data_[offset(mode_index(a), comp, node)];
    }

    // Read helper that treats everything outside the stored box as zero.
    Complex coeff(const Mode& a, int comp = 0, int node = 0) const {
        if (comp < 0 || comp >= components_)
            throw AxisOutOfRange("component index out of range");
        if (node < 0 || node >= node_count())
            throw AxisOutOfRange("node index out of range");
        if (!in_box(a)) return Complex(0.0, 0.0);
        return data_[offset(mode_index(a), comp, node)];
    }

    Complex* mode_ptr(size_t mode_idx, int comp) {
        return data_.data() + offset(mode_idx, comp, 0);
    }
    const Complex* mode_ptr(size_t mode_idx, int comp) const {
        return data_.data() + offset(mode_idx, comp, 0);
    }

    // Visits modes in lexicographic multi-index order (the serialization order).
    void for_each_mode(const std::function<void(const Mode&, size_t)>& fn) const {
        if (dim_ == 1) {
            for (int a = -trunc_; a <= trunc_; ++a) {
                Mode m{a, 0};
                fn(m, mode_index(m));
            }
        } else {
            for (int a1 = -trunc_; a1 <= trunc_; ++a1)
                for (int a2 = -trunc_; a2 <= trunc_; ++a2) {
                    Mode m{a1, a2};
                    fn(m, mode_index(m));
                }
        }
    }

    bool same_layout(const SpectralField& o) const {
        return dim_ == o.dim_ && kind_ == o.kind_ && nodes_ == o.nodes_;
    }

    bool same_shape(const SpectralField& o) const {
        return same_layout(o) && trunc_ == o.trunc_ && components_ == o.components_;
    }

    // In-place this += a * x; shapes must match exactly (hot path of the time stepper).
    void add_scaled(const SpectralField& x, double a) {
        if (!same_shape(x))
            throw DimensionMismatch("add_scaled needs identically shaped fields");
        for (size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
        real_valued_ = real_valued_ && x.real_valued_;
    }

    void scale(double a) {
        for (auto& c : data_) c *= a;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& c : data_) m = std::max(m, std::abs(c));
        return m;
    }

    const std::vector<Complex>& raw() const { return data_; }
    std::vector<Complex>& raw() { return data_; }

private:
    void check_access(const Mode& a, int comp, int node) const {
        if (dim_ == 1 && a[1] != 0)
            throw DimensionMismatch("second mode index must be 0 for a 1-d field");
        if (std::abs(a[0]) > trunc_ || (dim_ == 2 && std::abs(a[1]) > trunc_))
            throw IndexOutOfTruncation("mode (" + std::to_string(a[0]) + "," +
                                       std::to_string(a[1]) + ") outside box of size " +
                                       std::to_string(trunc_));
        if (comp < 0 || comp >= components_)
            throw AxisOutOfRange("component index out of range");
        if (node < 0 || node >= node_count())
            throw AxisOutOfRange("node index out of range");
    }

    size_t offset(size_t mode_idx, int comp, int node) const {
        return (static_cast<size_t>(comp) * mode_count() + mode_idx) *
                   static_cast<size_t>(node_count()) +
               static_cast<size_t>(node);
    }

    int dim_;
    int trunc_;
    int components_;
    Transverse kind_;
    std::vector<double> nodes_;
    bool real_valued_ = false;
    std::vector<Complex> data_;
};

// Builds a scalar periodic field from sparse (multi-index, coefficient) entries.
inline SpectralField make_field(
    const std::vector<std::pair<std::vector<int>, Complex>>& entries, int dim, int trunc) {
    SpectralField f(dim, trunc);
    for (const auto& [idx, value] : entries) {
        if (static_cast<int>(idx.size()) != dim)
            throw DimensionMismatch("entry arity " + std::to_string(idx.size()) +
                                    " does not match dimension " + std::to_string(dim));
        Mode m{idx[0], dim == 2 ? idx[1] : 0};
        f.at(m) += value;
    }
    return f;
}

inline double mode_l2(const Mode& a) {
    return std::sqrt(static_cast<double>(a[0]) * a[0] + static_cast<double>(a[1]) * a[1]);
}

// Euclidean projection: keeps modes with |alpha|_2 <= N, zeroing the rest, and
// shrinks the storage box accordingly. Idempotent, and the identity when N
// is at least the current truncation level.
inline SpectralField truncate(const SpectralField& f, int N) {
    if (N < 0) throw IndexOutOfTruncation("truncation level must be nonnegative");
    int nb = std::min(N, f.trunc());
    SpectralField out(f.dim(), nb, f.components(), f.kind(), f.nodes());
    out.set_real_valued(f.real_valued());
    const int nn = f.node_count();
    out.for_each_mode([&](const Mode& m, size_t oidx) {
        if (mode_l2(m) > static_cast<double>(N)) return;
        size_t fidx = f.mode_index(m);
        for (int c = 0; c < f.components(); ++c) {
            const Complex* src = f.mode_ptr(fidx, c);
            Complex* dst = out.mode_ptr(oidx, c);
            for (int j = 0; j < nn; ++j) dst[j] = src[j];
        }
    });
    return out;
}

// Fourier-space product: convolution in the periodic indices, pointwise in the
// transverse nodes. The result box N_f + N_g holds every nonzero output mode;
// pass out_trunc to clip the output box (cheaper than convolving then truncating).
inline SpectralField convolve(const SpectralField& f, const SpectralField& g,
                              int out_trunc = -1) {
    if (f.dim() != g.dim())
        throw DimensionMismatch("convolution operands differ in dimension");
    if (f.kind() != g.kind() || f.nodes() != g.nodes())
        throw GridMismatch("convolution operands differ in transverse layout");
    if (f.components() != 1 || g.components() != 1)
        throw DimensionMismatch("convolution is defined for scalar fields");
    const int full = f.trunc() + g.trunc();
    const int No = out_trunc < 0 ? full : std::min(out_trunc, full);
    SpectralField out(f.dim(), No, 1, f.kind(), f.nodes());
    const int nn = f.node_count();
    // Scatter over the nonzero support of both factors; zero modes (common
    // after truncation to the Euclidean ball, or for sparse data) cost nothing.
    struct Entry {
        int a1, a2;
        const Complex* p;
    };
    auto gather = [nn](const SpectralField& h) {
        std::vector<Entry> nz;
        h.for_each_mode([&](const Mode& m, size_t idx) {
            const Complex* p = h.mode_ptr(idx, 0);
            for (int j = 0; j < nn; ++j)
                if (p[j] != Complex(0.0, 0.0)) {
                    nz.push_back(Entry{m[0], m[1], p});
                    return;
                }
        });
        return nz;
    };
    const std::vector<Entry> nzf = gather(f);
    const std::vector<Entry> nzg = gather(g);
    for (const Entry& ef : nzf)
        for (const Entry& eg : nzg) {
            const int a1 = ef.a1 + eg.a1;
            const int a2 = ef.a2 + eg.a2;
            if (std::abs(a1) > No || std::abs(a2) > No) continue;
            Complex* dst = out.mode_ptr(out.mode_index(Mode{a1, a2}), 0);
            for (int j = 0; j < nn; ++j) dst[j] += ef.p[j] * eg.p[j];
        }
    out.set_real_valued(f.real_valued() && g.real_valued());
    return out;
}

// Product of a purely periodic scalar with a transverse scalar: convolution in
// the periodic indices, the periodic factor broadcast across nodes.
inline SpectralField convolve_broadcast(const SpectralField& a, const SpectralField& b,
                                        int out_trunc = -1) {
    if (a.kind() != Transverse::none)
        throw DimensionMismatch("broadcast factor must be purely periodic");
    if (a.dim() != b.dim())
        throw DimensionMismatch("convolution operands differ in dimension");
    if (a.components() != 1 || b.components() != 1)
        throw DimensionMismatch("convolution is defined for scalar fields");
    const int full = a.trunc() + b.trunc();
    const int No = out_trunc < 0 ? full : std::min(out_trunc, full);
    SpectralField out(b.dim(), No, 1, b.kind(), b.nodes());
    const int nn = b.node_count();
    const int Na = a.trunc(), Nb = b.trunc();
    if (a.dim() == 1) {
        for (int k = -No; k <= No; ++k) {
            Complex* dst = out.mode_ptr(out.mode_index(Mode{k, 0}), 0);
            const int lo = std::max(-Na, k - Nb), hi = std::min(Na, k + Nb);
            for (int p = lo; p <= hi; ++p) {
                const Complex av = *a.mode_ptr(a.mode_index(Mode{p, 0}), 0);
                const Complex* pb = b.mode_ptr(b.mode_index(Mode{k - p, 0}), 0);
                for (int j = 0; j < nn; ++j) dst[j] += av * pb[j];
            }
        }
    } else {
        for (int k1 = -No; k1 <= No; ++k1)
            for (int k2 = -No; k2 <= No; ++k2) {
                Complex* dst = out.mode_ptr(out.mode_index(Mode{k1, k2}), 0);
                const int lo1 = std::max(-Na, k1 - Nb), hi1 = std::min(Na, k1 + Nb);
                const int lo2 = std::max(-Na, k2 - Nb), hi2 = std::min(Na, k2 + Nb);
                for (int p1 = lo1; p1 <= hi1; ++p1)
                    for (int p2 = lo2; p2 <= hi2; ++p2) {
                        const Complex av = *a.mode_ptr(a.mode_index(Mode{p1, p2}), 0);
                        const Complex* pb =
                            b.mode_ptr(b.mode_index(Mode{k1 - p1, k2 - p2}), 0);
                        for (int j = 0; j < nn; ++j) dst[j] += av * pb[j];
                    }
            }
    }
    out.set_real_valued(a.real_valued() && b.real_valued());
    return out;
}

// Spectral partial derivative along periodic axis 0 or 1: multiply by i*alpha_axis.
inline SpectralField derivative(const SpectralField& f, int axis) {
    if (axis < 0 || axis >= f.dim())
        throw AxisOutOfRange("derivative axis " + std::to_string(axis) +
                             " invalid for dimension " + std::to_string(f.dim()));
    SpectralField out(f.dim(), f.trunc(), f.components(), f.kind(), f.nodes());
    out.set_real_valued(f.real_valued());
    const int nn = f.node_count();
    f.for_each_mode([&](const Mode& m, size_t idx) {
        const Complex w(0.0, static_cast<double>(axis == 0 ? m[0] : m[1]));
        for (int c = 0; c < f.components(); ++c) {
            const Complex* src = f.mode_ptr(idx, c);
            Complex* dst = out.mode_ptr(idx, c);
            for (int j = 0; j < nn; ++j) dst[j] = w * src[j];
        }
    });
    return out;
}

// Coefficient-wise sum on the union box (operands may differ in truncation level).
inline SpectralField add_fields(const SpectralField& f, const SpectralField& g) {
    if (f.dim() != g.dim() || f.components() != g.components())
        throw DimensionMismatch("sum operands differ in dimension or arity");
    if (f.kind() != g.kind() || f.nodes() != g.nodes())
        throw GridMismatch("sum operands differ in transverse layout");
    const int N = std::max(f.trunc(), g.trunc());
    SpectralField out(f.dim(), N, f.components(), f.kind(), f.nodes());
    out.set_real_valued(f.real_valued() && g.real_valued());
    const int nn = f.node_count();
    out.for_each_mode([&](const Mode& m, size_t idx) {
        for (int c = 0; c < f.components(); ++c) {
            Complex* dst = out.mode_ptr(idx, c);
            for (int j = 0; j < nn; ++j) dst[j] = f.coeff(m, c, j) + g.coeff(m, c, j);
        }
    });
    return out;
}

inline SpectralField scaled(const SpectralField& f, double a) {
    SpectralField out = f;
    out.scale(a);
    return out;
}

inline SpectralField extract_component(const SpectralField& f, int comp) {
    if (comp < 0 || comp >= f.components())
        throw AxisOutOfRange("component index out of range");
    SpectralField out(f.dim(), f.trunc(), 1, f.kind(), f.nodes());
    out.set_real_valued(f.real_valued());
    const int nn = f.node_count();
    f.for_each_mode([&](const Mode&, size_t idx) {
        const Complex* src = f.mode_ptr(idx, comp);
        Complex* dst = out.mode_ptr(idx, 0);
        for (int j = 0; j < nn; ++j) dst[j] = src[j];
    });
    return out;
}

inline void set_component(SpectralField& f, int comp, const SpectralField& scalar) {
    if (comp < 0 || comp >= f.components())
        throw AxisOutOfRange("component index out of range");
    if (scalar.components() != 1 || scalar.dim() != f.dim() || scalar.trunc() != f.trunc() ||
        scalar.kind() != f.kind() || scalar.nodes() != f.nodes())
        throw DimensionMismatch("component source must be a scalar field of matching shape");
    const int nn = f.node_count();
    f.for_each_mode([&](const Mode&, size_t idx) {
        const Complex* src = scalar.mode_ptr(idx, 0);
        Complex* dst = f.mode_ptr(idx, comp);
        for (int j = 0; j < nn; ++j) dst[j] = src[j];
    });
}

// First k components as a standalone field.
inline SpectralField take_components(const SpectralField& f, int k) {
    if (k < 1 || k > f.components())
        throw AxisOutOfRange("component count out of range");
    SpectralField out(f.dim(), f.trunc(), k, f.kind(), f.nodes());
    out.set_real_valued(f.real_valued());
    const int nn = f.node_count();
    f.for_each_mode([&](const Mode&, size_t idx) {
        for (int c = 0; c < k; ++c) {
            const Complex* src = f.mode_ptr(idx, c);
            Complex* dst = out.mode_ptr(idx, c);
            for (int j = 0; j < nn; ++j) dst[j] = src[j];
        }
    });
    return out;
}

// Stacks scalar fields of identical shape into one multi-component field.
inline SpectralField stack_fields(const std::vector<SpectralField>& parts) {
    if (parts.empty()) throw DimensionMismatch("cannot stack zero fields");
    const SpectralField& p0 = parts.front();
    SpectralField out(p0.dim(), p0.trunc(), static_cast<int>(parts.size()), p0.kind(),
                      p0.nodes());
    bool rv = true;
    for (size_t c = 0; c < parts.size(); ++c) {
        set_component(out, static_cast<int>(c), parts[c]);
        rv = rv && parts[c].real_valued();
    }
    out.set_real_valued(rv);
    return out;
}

// Applies a dense node_count x node_count matrix (row-major) along the node axis.
inline SpectralField apply_node_matrix(const SpectralField& f, const std::vector<double>& mat) {
    const int nn = f.node_count();
    if (static_cast<size_t>(nn) * nn != mat.size())
        throw GridMismatch("node matrix size does not match node count");
    SpectralField out(f.dim(), f.trunc(), f.components(), f.kind(), f.nodes());
    out.set_real_valued(f.real_valued());
    f.for_each_mode([&](const Mode&, size_t idx) {
        for (int c = 0; c < f.components(); ++c) {
            const Complex* src = f.mode_ptr(idx, c);
            Complex* dst = out.mode_ptr(idx, c);
            for (int r = 0; r < nn; ++r) {
                Complex acc(0.0, 0.0);
                const double* row = mat.data() + static_cast<size_t>(r) * nn;
                for (int j = 0; j < nn; ++j) acc += row[j] * src[j];
                dst[r] = acc;
            }
        }
    });
    return out;
}

// Multiplies each node slot by a real weight (e.g. a function of the node coordinate).
inline SpectralField scale_nodes(const SpectralField& f, const std::vector<double>& w) {
    const int nn = f.node_count();
    if (static_cast<int>(w.size()) != nn)
        throw GridMismatch("node weight size does not match node count");
    SpectralField out = f;
    out.for_each_mode([&](const Mode&, size_t idx) {
        for (int c = 0; c < f.components(); ++c) {
            Complex* dst = out.mode_ptr(idx, c);
            for (int j = 0; j < nn; ++j) dst[j] *= w[j];
        }
    });
    return out;
}

// Largest deviation from the conjugate symmetry c_{-alpha} = conj(c_alpha).
inline double hermitian_residual(const SpectralField& f) {
    double worst = 0.0;
    const int nn = f.node_count();
    f.for_each_mode([&](const Mode& m, size_t idx) {
        Mode neg{-m[0], -m[1]};
        size_t nidx = f.mode_index(neg);
        for (int c = 0; c < f.components(); ++c) {
            const Complex* a = f.mode_ptr(idx, c);
            const Complex* b = f.mode_ptr(nidx, c);
            for (int j = 0; j < nn; ++j)
                worst = std::max(worst, std::abs(b[j] - std::conj(a[j])));
        }
    });
    return worst;
}

// Relative conjugate-symmetry check used to validate real-valued fields.
inline bool is_hermitian(const SpectralField& f, double rel_tol = 1e-13) {
    return hermitian_residual(f) <= rel_tol * (1.0 + f.max_abs());
}

// Projects onto the conjugate-symmetric part, making the field real-valued.
inline SpectralField hermitian_symmetrize(const SpectralField& f) {
    SpectralField out(f.dim(), f.trunc(), f.components(), f.kind(), f.nodes());
    const int nn = f.node_count();
    f.for_each_mode([&](const Mode& m, size_t idx) {
        Mode neg{-m[0], -m[1]};
        size_t nidx = f.mode_index(neg);
        for (int c = 0; c < f.components(); ++c) {
            const Complex* a = f.mode_ptr(idx, c);
            const Complex* b = f.mode_ptr(nidx, c);
            Complex* dst = out.mode_ptr(idx, c);
            for (int j = 0; j < nn; ++j) dst[j] = 0.5 * (a[j] + std::conj(b[j]));
        }
    });
    out.set_real_valued(true);
    return out;
}

// Evaluates a scalar periodic field on a uniform grid, x_j = 2*pi*j/M per axis,
// row-major over axes. Each axis needs at least 2N+1 points to resolve the box.
inline std::vector<Complex> evaluate_physical(const SpectralField& f,
                                              const std::vector<int>& sizes) {
    if (f.kind() != Transverse::none)
        throw DimensionMismatch("physical evaluation needs a purely periodic field");
    if (f.components() != 1)
        throw DimensionMismatch("physical evaluation is defined for scalar fields");
    if (static_cast<int>(sizes.size()) != f.dim())
        throw DimensionMismatch("grid size list does not match dimension");
    for (int M : sizes)
        if (M < 2 * f.trunc() + 1)
            throw GridTooCoarse("need at least " + std::to_string(2 * f.trunc() + 1) +
                                " points per axis");
    const double two_pi = 2.0 * M_PI;
    if (f.dim() == 1) {
        const int M = sizes[0];
        std::vector<Complex> out(M, Complex(0.0, 0.0));
        for (int j = 0; j < M; ++j) {
            const double x = two_pi * j / M;
            Complex acc(0.0, 0.0);
            for (int k = -f.trunc(); k <= f.trunc(); ++k)
                acc += f.coeff(Mode{k, 0}) * std::polar(1.0, k * x);
            out[j] = acc;
        }
        return out;
    }
    const int M1 = sizes[0], M2 = sizes[1];
    std::vector<Complex> out(static_cast<size_t>(M1) * M2, Complex(0.0, 0.0));
    for (int j1 = 0; j1 < M1; ++j1)
        for (int j2 = 0; j2 < M2; ++j2) {
            const double x1 = two_pi * j1 / M1, x2 = two_pi * j2 / M2;
            Complex acc(0.0, 0.0);
            for (int k1 = -f.trunc(); k1 <= f.trunc(); ++k1)
                for (int k2 = -f.trunc(); k2 <= f.trunc(); ++k2)
                    acc += f.coeff(Mode{k1, k2}) * std::polar(1.0, k1 * x1 + k2 * x2);
            out[static_cast<size_t>(j1) * M2 + j2] = acc;
        }
    return out;
}

// Inverse of evaluate_physical on the same grid: discrete Fourier analysis of
// uniform samples into a coefficient box. Exact when the sampled function has
// no modes beyond the grid's aliasing limit.
inline SpectralField from_physical(const std::vector<Complex>& samples, int dim, int trunc,
                                   const std::vector<int>& sizes) {
    if (static_cast<int>(sizes.size()) != dim)
        throw DimensionMismatch("grid size list does not match dimension");
    for (int M : sizes)
        if (M < 2 * trunc + 1)
            throw GridTooCoarse("need at least " + std::to_string(2 * trunc + 1) +
                                " points per axis");
    SpectralField f(dim, trunc);
    const double two_pi = 2.0 * M_PI;
    if (dim == 1) {
        const int M = sizes[0];
        if (static_cast<int>(samples.size()) != M)
            throw DimensionMismatch("sample count does not match grid size");
        for (int k = -trunc; k <= trunc; ++k) {
            Complex acc(0.0, 0.0);
            for (int j = 0; j < M; ++j)
                acc += samples[j] * std::polar(1.0, -k * (two_pi * j / M));
            f.at(Mode{k, 0}) = acc / static_cast<double>(M);
        }
        return f;
    }
    const int M1 = sizes[0], M2 = sizes[1];
    if (samples.size() != static_cast<size_t>(M1) * M2)
        throw DimensionMismatch("sample count does not match grid size");
    for (int k1 = -trunc; k1 <= trunc; ++k1)
        for (int k2 = -trunc; k2 <= trunc; ++k2) {
            Complex acc(0.0, 0.0);
            for (int j1 = 0; j1 < M1; ++j1)
                for (int j2 = 0; j2 < M2; ++j2) {
                    const double phase =
                        -(k1 * (two_pi * j1 / M1) + k2 * (two_pi * j2 / M2));
                    acc += samples[static_cast<size_t>(j1) * M2 + j2] *
                           std::polar(1.0, phase);
                }
            f.at(Mode{k1, k2}) = acc / static_cast<double>(M1 * M2);
        }
    return f;
}

// Text serialization. Header: dim N components kind node_count real_flag,
// then (when transverse) one line listing the node coordinates, then one line
// per (mode, component, node) in storage order: alpha_1 [alpha_2] re im.
inline void write_field(std::ostream& out, const SpectralField& f) {
    out << f.dim() << ' ' << f.trunc() << ' ' << f.components() << ' '
        << transverse_name(f.kind()) << ' ' << f.node_count() << ' '
        << (f.real_valued() ? 1 : 0) << '\n';
    if (f.kind() != Transverse::none) {
        out << "nodes";
        for (double v : f.nodes()) out << ' ' << fmt17(v);
        out << '\n';
    }
    const int nn = f.node_count();
    f.for_each_mode([&](const Mode& m, size_t idx) {
        for (int c = 0; c < f.components(); ++c) {
            const Complex* p = f.mode_ptr(idx, c);
            for (int j = 0; j < nn; ++j) {
                out << m[0];
                if (f.dim() == 2) out << ' ' << m[1];
                out << ' ' << fmt17(p[j].real()) << ' ' << fmt17(p[j].imag()) << '\n';
            }
        }
    });
}

inline void write_field(const std::string& path, const SpectralField& f) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    write_field(out, f);
}

inline SpectralField read_field(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty field file");
    auto head = split_ws(line);
    if (head.size() != 6) throw ConfigError("malformed field header");
    const int dim = static_cast<int>(parse_int(head[0], "dim"));
    const int trunc = static_cast<int>(parse_int(head[1], "truncation"));
    const int comps = static_cast<int>(parse_int(head[2], "components"));
    const Transverse kind = transverse_from_name(head[3]);
    const int nn = static_cast<int>(parse_int(head[4], "node count"));
    const bool rv = parse_int(head[5], "real flag") != 0;
    std::vector<double> nodes;
    if (kind != Transverse::none) {
        if (!std::getline(in, line)) throw ConfigError("missing node line");
        auto toks = split_ws(line);
        if (toks.empty() || toks[0] != "nodes" || static_cast<int>(toks.size()) != nn + 1)
            throw ConfigError("malformed node line");
        for (int j = 1; j <= nn; ++j) nodes.push_back(parse_double(toks[j], "node"));
    }
    SpectralField f(dim, trunc, comps, kind, nodes);
    f.set_real_valued(rv);
    const int per_line = dim + 2;
    size_t expected = f.mode_count() * static_cast<size_t>(comps) * f.node_count();
    size_t seen = 0;
    std::vector<Complex> flat;
    flat.reserve(expected);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto toks = split_ws(line);
        if (static_cast<int>(toks.size()) != per_line)
            throw ConfigError("malformed coefficient line: '" + line + "'");
        flat.emplace_back(parse_double(toks[per_line - 2], "re"),
                          parse_double(toks[per_line - 1], "im"));
        ++seen;
    }
    if (seen != expected)
        throw ConfigError("coefficient count " + std::to_string(seen) + " does not match header");
    size_t pos = 0;
    const int nnodes = f.node_count();
    f.for_each_mode([&](const Mode&, size_t idx) {
        for (int c = 0; c < comps; ++c) {
            Complex* dst = f.mode_ptr(idx, c);
            for (int j = 0; j < nnodes; ++j) dst[j] = flat[pos++];
        }
    });
    return f;
}

inline SpectralField read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "' for reading");
    return read_field(in);
}

} // namespace genfun
