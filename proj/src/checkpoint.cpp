#include "mlzsr/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "mlzsr/errors.hpp"

namespace mlzsr {
namespace {

constexpr char kMagic[8] = {'M', 'L', 'Z', 'S', 'R', 'C', 'P', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(os, bits);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw ParseError("checkpoint: truncated u32");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw ParseError("checkpoint: truncated u64");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& is) {
  std::uint64_t bits = get_u64(is);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void put_matrix(std::ostream& os, const Matrix& m) {
  for (double v : m.data) put_f64(os, v);
}

void get_matrix(std::istream& is, Matrix& m) {
  for (double& v : m.data) v = get_f64(is);
}

}  // namespace

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  os.write(kMagic, 8);
  put_u32(os, 1);
  os.put(static_cast<char>(ckpt.kind));
  os.put(ckpt.randomized_semantics ? 1 : 0);
  put_u64(os, ckpt.semantics_seed);

  const bool has_sem = ckpt.has_semantic_model();
  const std::uint32_t d_x = static_cast<std::uint32_t>(ckpt.visual.input_dim());
  const std::uint32_t n1 = static_cast<std::uint32_t>(ckpt.visual.dense.w.cols);
  const std::uint32_t n2 = static_cast<std::uint32_t>(ckpt.visual.dense.w.rows);
  const std::uint32_t d_e = static_cast<std::uint32_t>(ckpt.visual.embed_dim());
  const std::uint32_t d_s = has_sem ? static_cast<std::uint32_t>(ckpt.semantic.input_dim()) : 0;
  const std::uint32_t n1s = has_sem ? static_cast<std::uint32_t>(ckpt.semantic.hidden.w.rows) : 0;
  put_u32(os, d_x);
  put_u32(os, n1);
  put_u32(os, n2);
  put_u32(os, d_e);
  put_u32(os, d_s);
  put_u32(os, n1s);
  put_f64(os, ckpt.visual.dropout_rate);
  put_u32(os, static_cast<std::uint32_t>(ckpt.round));
  put_f64(os, ckpt.best_val_imap);

  for (const Matrix* m : ckpt.visual.params()) put_matrix(os, *m);
  if (has_sem) {
    for (const Matrix* m : ckpt.semantic.params()) put_matrix(os, *m);
  }
}

Checkpoint read_checkpoint(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) {
    throw ParseError("checkpoint: bad magic bytes");
  }
  const std::uint32_t version = get_u32(is);
  if (version != 1) throw ParseError("checkpoint: unsupported version " + std::to_string(version));

  Checkpoint ckpt;
  int kind = is.get();
  int randomized = is.get();
  if (kind < 0 || kind > 2 || randomized < 0) throw ParseError("checkpoint: bad header flags");
  ckpt.kind = static_cast<ModelKind>(kind);
  ckpt.randomized_semantics = randomized != 0;
  ckpt.semantics_seed = get_u64(is);

  const std::uint32_t d_x = get_u32(is);
  const std::uint32_t n1 = get_u32(is);
  const std::uint32_t n2 = get_u32(is);
  const std::uint32_t d_e = get_u32(is);
  const std::uint32_t d_s = get_u32(is);
  const std::uint32_t n1s = get_u32(is);
  const double dropout = get_f64(is);
  ckpt.round = get_u32(is);
  ckpt.best_val_imap = get_f64(is);
  if (d_x == 0 || n1 == 0 || n2 == 0 || d_e == 0) throw ParseError("checkpoint: zero dimension");

  Rng scratch(0);
  const VisualFront front =
      ckpt.kind == ModelKind::kNrc ? VisualFront::kDense : VisualFront::kRecurrent;
  ckpt.visual = init_visual_model({d_x, n1, n2, d_e}, dropout, scratch, front);
  for (Matrix* m : ckpt.visual.params()) get_matrix(is, *m);
  if (ckpt.has_semantic_model()) {
    if (d_s == 0 || n1s == 0) throw ParseError("checkpoint: missing semantic dims");
    ckpt.semantic = init_semantic_model({d_s, n1s, d_e}, scratch);
    for (Matrix* m : ckpt.semantic.params()) get_matrix(is, *m);
  }
  if (!is) throw ParseError("checkpoint: truncated parameter block");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  write_checkpoint(os, ckpt);
  os.flush();
  if (!os) throw DataError("write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint '" + path + "'");
  return read_checkpoint(is);
}

void dump_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  const char* kind_name = ckpt.kind == ModelKind::kFull  ? "full"
                          : ckpt.kind == ModelKind::kNrc ? "nrc"
                                                         : "wse";
  os << "MLZSRCP1 text dump\n";
  os << "kind " << kind_name << '\n';
  os << "randomized_semantics " << (ckpt.randomized_semantics ? 1 : 0) << " seed "
     << ckpt.semantics_seed << '\n';
  os << "round " << ckpt.round << " best_val_imap ";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", ckpt.best_val_imap);
  os << buf << '\n';
  os << "dropout_rate ";
  std::snprintf(buf, sizeof(buf), "%.17g", ckpt.visual.dropout_rate);
  os << buf << '\n';

  auto dump_params = [&os, &buf](const char* side, const std::vector<const Matrix*>& params) {
    for (std::size_t p = 0; p < params.size(); ++p) {
      const Matrix& m = *params[p];
      os << side << " param " << p << " shape " << m.rows << 'x' << m.cols << '\n';
      for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
          if (j) os << ' ';
          std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
          os << buf;
        }
        os << '\n';
      }
    }
  };
  dump_params("visual", ckpt.visual.params());
  if (ckpt.has_semantic_model()) dump_params("semantic", ckpt.semantic.params());
}

}  // namespace mlzsr
