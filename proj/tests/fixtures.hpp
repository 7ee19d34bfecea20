#ifndef EDT_TESTS_FIXTURES_HPP
#define EDT_TESTS_FIXTURES_HPP

#include "edt/dataset.hpp"

#include <string>

namespace fixture {

inline std::string data_path(std::string const& name) { return std::string(EDT_DATA_DIR) + "/" + name; }

inline edt::FitnessMatrix supermarket()
{
    auto const schema = edt::load_schema_file(data_path("supermarket.schema"));
    return edt::sanitize(edt::normalize(edt::load_table_file(data_path("supermarket.csv"), schema), schema));
}

// Reference values printed to two decimals for the ten-store example.
inline edt::Matrix printed_phi()
{
    edt::Matrix p(10, 7);
    p << 0.90, 0.62, 0.62, 0.74, 0.71, 0.33, 0.00,
         0.90, 0.38, 0.85, 0.44, 0.64, 0.67, 0.00,
         0.90, 0.46, 0.54, 0.85, 0.82, 0.67, 0.00,
         0.80, 0.38, 1.00, 0.37, 0.36, 0.33, 1.00,
         0.75, 0.62, 0.23, 0.52, 0.57, 1.00, 1.00,
         0.65, 0.46, 0.77, 0.89, 0.64, 0.67, 0.00,
         0.50, 0.38, 0.92, 0.48, 0.71, 0.67, 0.00,
         0.25, 0.54, 0.54, 1.00, 0.79, 0.33, 1.00,
         0.00, 1.00, 0.31, 0.30, 1.00, 0.67, 1.00,
         0.00, 0.77, 0.46, 0.85, 0.86, 1.00, 0.00;
    return p;
}

inline edt::Vector printed_means()
{
    edt::Vector v(7);
    v << 0.57, 0.56, 0.62, 0.64, 0.71, 0.63, 0.40;
    return v;
}

inline edt::Vector printed_dombal_rest()
{
    edt::Vector v(7);
    v << 0.15, 0.15, 0.14, 0.14, 0.13, 0.14, 0.17;
    return v;
}

inline edt::Vector printed_altsel_rest()
{
    edt::Vector v(7);
    v << 0.09, 0.21, 0.19, 0.13, 0.16, 0.14, 0.07;
    return v;
}

inline edt::Matrix printed_dw()
{
    edt::Matrix d(7, 7);
    d << -3.81, 1.46, -1.09, 0.19, 1.18, 0.69, 1.45,
         1.46, -1.14, 1.15, 0.15, -0.69, -0.43, -0.91,
         -1.09, 1.15, -1.94, 0.30, 0.75, 0.90, 1.32,
         0.19, 0.15, 0.30, -1.85, -0.30, 0.11, 1.23,
         1.18, -0.69, 0.75, -0.30, -0.89, -0.30, 0.43,
         0.69, -0.43, 0.90, 0.11, -0.30, -1.79, 0.64,
         1.45, -0.91, 1.32, 1.23, 0.43, 0.64, -7.69;
    return d;
}

inline edt::Matrix printed_d()
{
    edt::Matrix d(7, 7);
    d << -3.81, 0.22, -1.72, -0.72, 0.07, -0.34, 0.22,
         0.84, -1.14, 0.62, -0.14, -0.73, -0.58, -1.04,
         -1.35, 0.34, -1.94, -0.22, 0.18, 0.23, 0.41,
         -0.37, -0.44, -0.24, -1.85, -0.61, -0.37, 0.30,
         0.45, -1.01, 0.20, -0.57, -0.89, -0.58, -0.33,
         0.04, -0.85, 0.25, -0.34, -0.58, -1.79, -0.12,
         -0.68, -2.64, -0.84, -0.93, -1.62, -1.41, -7.69;
    return d;
}

} // namespace fixture

#endif
