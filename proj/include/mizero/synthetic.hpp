#pragma once

#include <cstdint>

#include "mizero/corpus.hpp"

namespace mizero {

// Deterministic two-style benchmark corpus: a somber archaic "verse" style
// (protected) against a breezy modern "chat" style (unprotected). Vocabulary
// overlaps the bundled attack lexicons so the perturbation suite has bite.
Corpus make_synthetic_corpus(std::size_t train_per_class, std::size_t test_per_class,
                             std::uint64_t seed, std::size_t val_per_class = 0);

} // namespace mizero
