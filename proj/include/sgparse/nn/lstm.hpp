#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace sgparse::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Vector sigmoid(const Vector& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

// One direction of an LSTM layer. Gates are stacked [input, forget, output,
// candidate] in `w` (4H x (in + H)) and `b` (4H).
struct LstmWeights {
  Matrix w;
  Vector b;

  Eigen::Index hidden() const { return b.size() / 4; }
  Eigen::Index input() const { return w.cols() - hidden(); }
};

// Per-step values kept for the backward pass, in processing order.
struct LstmTrace {
  Matrix xh;     // (in + H) x T: [x_t; h_{t-1}]
  Matrix gates;  // 4H x T, post-activation
  Matrix cell;   // H x T
  Matrix cell_tanh;
};

// Runs the cell over the columns of `x`, right to left when `reverse`.
// Output column t is the hidden state after reading position t.
inline Matrix lstm_forward(const LstmWeights& p, const Matrix& x, bool reverse, LstmTrace* trace) {
  const Eigen::Index H = p.hidden();
  const Eigen::Index I = p.input();
  const Eigen::Index T = x.cols();
  Matrix out(H, T);
  if (trace) {
    trace->xh.resize(I + H, T);
    trace->gates.resize(4 * H, T);
    trace->cell.resize(H, T);
    trace->cell_tanh.resize(H, T);
  }
  Vector h = Vector::Zero(H);
  Vector c = Vector::Zero(H);
  Vector xh(I + H);
  for (Eigen::Index step = 0; step < T; ++step) {
    const Eigen::Index t = reverse ? T - 1 - step : step;
    xh.head(I) = x.col(t);
    xh.tail(H) = h;
    Vector z = p.w * xh + p.b;
    Vector g(4 * H);
    g.head(3 * H) = sigmoid(z.head(3 * H));
    g.tail(H) = z.tail(H).array().tanh().matrix();
    c = g.segment(H, H).cwiseProduct(c) + g.head(H).cwiseProduct(g.tail(H));
    Vector ct = c.array().tanh().matrix();
    h = g.segment(2 * H, H).cwiseProduct(ct);
    out.col(t) = h;
    if (trace) {
      trace->xh.col(step) = xh;
      trace->gates.col(step) = g;
      trace->cell.col(step) = c;
      trace->cell_tanh.col(step) = ct;
    }
  }
  return out;
}

// Backpropagates `d_out` (H x T, gradient w.r.t. each output column) through
// the recurrence. Accumulates into `grad` and `d_x` (in x T).
inline void lstm_backward(const LstmWeights& p, const LstmTrace& trace, bool reverse, const Matrix& d_out,
                          LstmWeights& grad, Matrix& d_x) {
  const Eigen::Index H = p.hidden();
  const Eigen::Index I = p.input();
  const Eigen::Index T = d_out.cols();
  Matrix dz_all(4 * H, T);
  Vector dh_next = Vector::Zero(H);
  Vector dc_next = Vector::Zero(H);
  for (Eigen::Index step = T - 1; step >= 0; --step) {
    const Eigen::Index t = reverse ? T - 1 - step : step;
    const auto g = trace.gates.col(step);
    const auto i = g.head(H).array();
    const auto f = g.segment(H, H).array();
    const auto o = g.segment(2 * H, H).array();
    const auto cand = g.tail(H).array();
    const auto ct = trace.cell_tanh.col(step).array();
    Vector c_prev = step > 0 ? Vector(trace.cell.col(step - 1)) : Vector::Zero(H);

    const Eigen::ArrayXd dh = (d_out.col(t) + dh_next).array();
    const Eigen::ArrayXd dc = dh * o * (1.0 - ct * ct) + dc_next.array();
    Vector dz(4 * H);
    dz.head(H) = (dc * cand * i * (1.0 - i)).matrix();
    dz.segment(H, H) = (dc * c_prev.array() * f * (1.0 - f)).matrix();
    dz.segment(2 * H, H) = (dh * ct * o * (1.0 - o)).matrix();
    dz.tail(H) = (dc * i * (1.0 - cand * cand)).matrix();
    dz_all.col(step) = dz;

    const Vector dxh = p.w.transpose() * dz;
    d_x.col(t) += dxh.head(I);
    dh_next = dxh.tail(H);
    dc_next = (dc * f).matrix();
  }
  grad.w.noalias() += dz_all * trace.xh.transpose();
  grad.b += dz_all.rowwise().sum();
}

}  // namespace sgparse::nn
