#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mizero {

struct MizeroError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input files / unparseable LLM responses.
struct ParseError : MizeroError {
    using MizeroError::MizeroError;
};

// Duplicate ids, overlapping splits.
struct IntegrityError : MizeroError {
    using MizeroError::MizeroError;
};

// Constraint violations on otherwise well-formed data (unbalanced classes etc).
struct ValidationError : MizeroError {
    using MizeroError::MizeroError;
};

// Not enough samples to satisfy a request.
struct CapacityError : MizeroError {
    using MizeroError::MizeroError;
};

// API misuse: dimension mismatches, updates on frozen parameters, missing
// required arguments.
struct ContractError : MizeroError {
    using MizeroError::MizeroError;
};

// Registry fingerprint does not match the supplied encoder/matrix.
struct RegistryError : MizeroError {
    using MizeroError::MizeroError;
};

// An episode produced an empty positive-pair set.
struct DegenerateEpisodeError : MizeroError {
    using MizeroError::MizeroError;
};

// LLM transport failure after retries.
struct TransportError : MizeroError {
    using MizeroError::MizeroError;
};

// FNV-1a over bytes, rendered as 16 hex chars. Used for parameter
// fingerprints and cache keys.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string fnv1a_hex(const std::string& s);

} // namespace mizero
