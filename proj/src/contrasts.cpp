#include "catenc/encoders.hpp"
#include "catenc/error.hpp"

namespace catenc {

Matrix contrast_matrix(ContrastKind kind, int m) {
  if (m < 2) throw EncoderError("contrast codings need at least two categories");
  Matrix c = Matrix::Zero(m, m - 1);
  const double md = m;
  // Rows and columns below are 0-based; column j here is column j+1 of the
  // usual 1-based statement.
  for (int j = 0; j < m - 1; ++j) {
    const double jj = j + 1;
    switch (kind) {
      case ContrastKind::onehot:
        c(j + 1, j) = 1.0;
        break;
      case ContrastKind::deviation:
        c(j, j) = 1.0;
        c(m - 1, j) = -1.0;
        break;
      case ContrastKind::difference:
        for (int r = 0; r <= j; ++r) c(r, j) = -1.0 / (jj + 1.0);
        c(j + 1, j) = jj / (jj + 1.0);
        break;
      case ContrastKind::helmert:
        c(j, j) = (md - jj) / (md - jj + 1.0);
        for (int r = j + 1; r < m; ++r) c(r, j) = -1.0 / (md - jj + 1.0);
        break;
      case ContrastKind::cumulative:
        for (int r = 0; r <= j; ++r) c(r, j) = (md - jj) / md;
        for (int r = j + 1; r < m; ++r) c(r, j) = -jj / md;
        break;
    }
  }
  return c;
}

}  // namespace catenc
