#ifndef SUPERADAM_ADAPTIVE_MATRIX_HPP
#define SUPERADAM_ADAPTIVE_MATRIX_HPP

#include "superadam/core.hpp"

namespace superadam {

// Positive-definite preconditioner H = A + lambda*I, stored either as a
// per-coordinate diagonal or as a single global scale.
class AdaptiveMatrix {
 public:
  enum class Kind { Diagonal, Scalar };

  static AdaptiveMatrix diagonal(Vector diag);
  static AdaptiveMatrix scalar(double s);

  Kind kind() const { return kind_; }
  const Vector& diag() const { return diag_; }
  double scalar_value() const { return s_; }

  double smallest_eigenvalue() const;
  double spectral_norm() const;

  // H^{-1} g
  Vector solve(const Vector& g) const;
  // H u
  Vector apply(const Vector& u) const;
  // u' H u
  double quad_form(const Vector& u) const;

 private:
  Kind kind_ = Kind::Scalar;
  Vector diag_;
  double s_ = 0.0;
};

inline double smallest_eigenvalue(const AdaptiveMatrix& H) { return H.smallest_eigenvalue(); }
inline double spectral_norm(const AdaptiveMatrix& H) { return H.spectral_norm(); }

enum class MatrixCase { Case1, Case2, Case3, Case4Diag, Case4Scalar };

const char* to_string(MatrixCase c);

// EMA state shared by the four generators. All buffers start at zero.
struct MatrixGeneratorState {
  MatrixCase case_id = MatrixCase::Case1;
  double beta = 0.999;   // cases 1-2
  double beta1 = 0.9;    // case 4 first moment
  double beta2 = 0.999;  // case 4 second moment
  double lambda = 5e-4;

  Vector v;   // case 1 / case 4 diagonal second moment
  Vector m;   // case 4 first moment
  double b = 0.0;  // cases 2 / 4 scalar

  // Below this displacement, case 3 falls back to scalar(lambda).
  static constexpr double kBbDegeneracyThreshold = 1e-12;

  MatrixGeneratorState() = default;
  MatrixGeneratorState(MatrixCase c, Index d, double lambda_in);

  void reset(Index d);
  void validate() const;
};

// Case 1: v_t = beta*v_{t-1} + (1-beta)*g.^2,  H = diag(sqrt(v_t) + lambda).
AdaptiveMatrix generate_case1(MatrixGeneratorState& st, const Vector& g);

// Case 2: b_t = beta*b_{t-1} + (1-beta)*||g||,  H = (b_t + lambda) I.
AdaptiveMatrix generate_case2(MatrixGeneratorState& st, const Vector& g);

// Case 3 (Barzilai-Borwein): both gradients must come from the same sample.
// b_t = |<grad_t - grad_prev, x_t - x_prev>| / ||x_t - x_prev||^2,
// H = (b_t + lambda) I; degenerate steps fall back to scalar(lambda).
AdaptiveMatrix generate_case3(const MatrixGeneratorState& st, const Vector& x_t,
                              const Vector& x_prev, const Vector& grad_t,
                              const Vector& grad_prev);

// Case 4: m_t = beta1*m_{t-1} + (1-beta1)*g, then the centered second moment
// of (g - m_t), diagonal or scalar depending on case_id.
AdaptiveMatrix generate_case4(MatrixGeneratorState& st, const Vector& g);

// Dispatch for the single-gradient cases (1, 2, 4).
AdaptiveMatrix generate(MatrixGeneratorState& st, const Vector& g);

}  // namespace superadam

#endif  // SUPERADAM_ADAPTIVE_MATRIX_HPP
