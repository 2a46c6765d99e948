#ifndef MLZSR_CHECKPOINT_HPP_
#define MLZSR_CHECKPOINT_HPP_

#include <iosfwd>
#include <string>

#include "mlzsr/train.hpp"

namespace mlzsr {

// Binary checkpoint layout, version 1 (all integers and floats little-endian):
//   bytes 0-7   magic "MLZSRCP1"
//   u32         version (1)
//   u8          model kind (0 full, 1 nrc, 2 wse)
//   u8          randomized-semantics flag
//   u64         semantics seed (when randomized)
//   u32 x6      d_x, n1, n2, d_e, d_s, n1s (d_s = n1s = 0 without a semantic model)
//   f64         dropout rate
//   u32         best round index
//   f64         best validation I-MAP
//   f64...      visual parameters, declaration order
//   f64...      semantic parameters, declaration order (when present)
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& is);

// Human-readable equivalent of the binary layout.
void dump_checkpoint(std::ostream& os, const Checkpoint& ckpt);

}  // namespace mlzsr

#endif  // MLZSR_CHECKPOINT_HPP_
