#ifndef CDESIM_ERRORS_HPP_
#define CDESIM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace cdesim {

struct invalid_dimension_error : std::invalid_argument {
    explicit invalid_dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

struct invalid_parameter_error : std::invalid_argument {
    explicit invalid_parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

struct singular_matrix_error : std::runtime_error {
    explicit singular_matrix_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cdesim

#endif  // CDESIM_ERRORS_HPP_
