#pragma once

// Text and JSON forms of library results. Reals are written with 17
// significant digits and complex numbers as "a+bi"; every writer has a
// reader that restores the value exactly.

#include <string>
#include <string_view>
#include <vector>

#include "psfexp/classify.hpp"
#include "psfexp/itinerary.hpp"
#include "psfexp/numerics.hpp"
#include "psfexp/pararay.hpp"

namespace psf {

std::string format_real(double x);
std::string format_complex(Complex z);
/// Accepts "a+bi", "a-bi", "a", "bi" with optional whitespace around the
/// whole text. Throws syntax on anything else.
Complex parse_complex(std::string_view text);
double parse_real(std::string_view text);

std::string format_order(const OrderData& order);  // e.g. "> < <"
OrderData parse_order(std::string_view text);

std::string to_json(const AddressClass& c);
AddressClass address_class_from_json(std::string_view text);

std::string to_json(const ClassReport& r);
ClassReport class_report_from_json(std::string_view text);

std::string to_json(const RayTrace& r);
RayTrace ray_trace_from_json(std::string_view text);

std::string to_json(const ConvergenceClass& c);
ConvergenceClass convergence_from_json(std::string_view text);

std::string to_json(const ParameterRaySample& s);
ParameterRaySample ray_sample_from_json(std::string_view text);

std::string to_json(const PsfParameter& p);
PsfParameter psf_parameter_from_json(std::string_view text);

std::string to_json(const AddressSearchResult& r);
AddressSearchResult address_search_from_json(std::string_view text);

std::string to_json(const DistinctnessReport& r);
DistinctnessReport distinctness_from_json(std::string_view text);

/// Header "t,re,im,residual" and one row per sample.
std::string samples_to_csv(const std::vector<ParameterRaySample>& samples);
std::vector<ParameterRaySample> samples_from_csv(std::string_view text);

std::string error_to_json(const Error& e);

}  // namespace psf
