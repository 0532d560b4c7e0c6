#pragma once

// Locale-independent number formatting and a deterministic JSON emitter
// (17 significant digits, non-finite values as null).

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <string>

namespace econ::cli
{

using Json = nlohmann::ordered_json;

inline std::string format_number(double v, int precision = 17)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

/// null for NaN and infinities, the value otherwise.
inline Json number_or_null(double v)
{
  if (!std::isfinite(v)) return nullptr;
  return v;
}

namespace detail
{
inline void emit(const Json& j, std::string& out, int indent)
{
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type())
  {
    case Json::value_t::number_float:
    {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_number(v) : "null";
      return;
    }
    case Json::value_t::object:
    {
      if (j.empty())
      {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items())
      {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(key).dump() + ": ";
        emit(value, out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array:
    {
      if (j.empty())
      {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalars = true;
      for (const auto& v : j)
        if (v.is_structured()) scalars = false;
      if (scalars)
      {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i)
        {
          if (i) out += ", ";
          emit(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i)
      {
        if (i) out += ",\n";
        out += inner;
        emit(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    default:
      out += j.dump();
  }
}
}

inline std::string to_json_text(const Json& j)
{
  std::string out;
  detail::emit(j, out, 0);
  out += "\n";
  return out;
}

}
