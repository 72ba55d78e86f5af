#pragma once

#include <stdexcept>
#include <string>

namespace seqmodel {

// Violated numerical or shape contract. The CLI maps this to exit code 3.
struct contract_error : std::runtime_error {
    explicit contract_error(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem problem; the message carries the offending path.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace seqmodel
