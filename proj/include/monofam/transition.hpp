#pragma once

#include "monofam/common.hpp"

namespace monofam {

/// Linear map between node spaces. Builders only ever need scaled identities
/// and coordinate masks; hand-built families may supply dense matrices.
struct TransitionOp {
  enum class Kind { Identity, Mask, Dense };

  Kind tag = Kind::Identity;
  double scale = 1.0;
  Vector mask;    // 0/1 per coordinate (Kind::Mask)
  Matrix dense;   // rows = target dim (Kind::Dense)

  static TransitionOp identity() { return TransitionOp{}; }

  static TransitionOp coord_mask(Vector m) {
    TransitionOp op;
    op.tag = Kind::Mask;
    op.mask = std::move(m);
    return op;
  }

  static TransitionOp dense_map(Matrix m) {
    TransitionOp op;
    op.tag = Kind::Dense;
    op.dense = std::move(m);
    return op;
  }

  static TransitionOp scaled_identity(double s) {
    TransitionOp op;
    op.scale = s;
    return op;
  }

  int out_dim(int in_dim) const {
    return tag == Kind::Dense ? static_cast<int>(dense.rows()) : in_dim;
  }

  Vector apply(const Vector& x) const {
    switch (tag) {
      case Kind::Identity:
        return scale == 1.0 ? x : Vector(scale * x);
      case Kind::Mask: {
        if (mask.size() != x.size())
          throw std::invalid_argument("TransitionOp: mask dimension mismatch");
        return scale * mask.cwiseProduct(x);
      }
      case Kind::Dense: {
        if (dense.cols() != x.size())
          throw std::invalid_argument("TransitionOp: matrix dimension mismatch");
        return scale * (dense * x);
      }
    }
    throw std::logic_error("TransitionOp: bad tag");
  }

  Matrix as_matrix(int in_dim) const {
    switch (tag) {
      case Kind::Identity:
        return scale * Matrix::Identity(in_dim, in_dim);
      case Kind::Mask:
        return scale * Matrix(mask.asDiagonal());
      case Kind::Dense:
        return scale * dense;
    }
    throw std::logic_error("TransitionOp: bad tag");
  }

  /// later ∘ earlier.
  static TransitionOp compose(const TransitionOp& later, const TransitionOp& earlier) {
    using K = Kind;
    TransitionOp out;
    out.scale = later.scale * earlier.scale;
    if (later.tag == K::Identity) {
      out.tag = earlier.tag;
      out.mask = earlier.mask;
      out.dense = earlier.dense;
      return out;
    }
    if (earlier.tag == K::Identity) {
      out.tag = later.tag;
      out.mask = later.mask;
      out.dense = later.dense;
      return out;
    }
    if (later.tag == K::Mask && earlier.tag == K::Mask) {
      out.tag = K::Mask;
      out.mask = later.mask.cwiseProduct(earlier.mask);
      return out;
    }
    // at least one dense: materialize with scales folded in
    out.tag = K::Dense;
    const int ein = (earlier.tag == K::Dense) ? static_cast<int>(earlier.dense.cols())
                                              : static_cast<int>(earlier.mask.size());
    const int mid = (earlier.tag == K::Dense) ? static_cast<int>(earlier.dense.rows())
                                              : static_cast<int>(earlier.mask.size());
    out.dense = later.as_matrix(mid) * earlier.as_matrix(ein);
    out.scale = 1.0;
    return out;
  }
};

/// Transition between two named nodes, forward in time only.
struct TransitionMap {
  int from_index = 0;
  int to_index = 0;
  TransitionOp op;
};

}  // namespace monofam
