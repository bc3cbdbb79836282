#pragma once

namespace cardiomesh {

/// Caps the OpenMP thread count. Results are identical for any value: the
/// parallel kernels are pure per-element maps with serial reductions.
void set_threads(int count);

int max_threads();

}  // namespace cardiomesh
