#pragma once

#include <map>
#include <string>
#include <utility>

#include "tourmon/csv.hpp"
#include "tourmon/date.hpp"
#include "tourmon/error.hpp"

namespace tourmon {

// (currency code, date) -> EUR rate. Lookups outside the table throw,
// never fall back to 1.0; EUR itself needs no row.
class CurrencyTable {
 public:
  void add(const std::string& code, const Date& date, double rate) {
    if (rate <= 0)
      throw ConfigError("fx rate must be > 0 for " + code + " on " +
                        date.str());
    rates_[{code, date}] = rate;
  }

  double rate(const std::string& code, const Date& date) const {
    if (code == "EUR") return 1.0;
    auto it = rates_.find({code, date});
    if (it == rates_.end())
      throw ConversionError("no EUR rate for " + code + " on " + date.str());
    return it->second;
  }

  double to_eur(double amount, const std::string& code,
                const Date& date) const {
    return amount * rate(code, date);
  }

  bool empty() const { return rates_.empty(); }

  // CSV columns: currency,date,rate_to_eur (header optional).
  static CurrencyTable load_csv(const std::string& path) {
    CurrencyTable t;
    auto rows = read_delimited_file(path, ',');
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (i == 0 && !row.empty() && row[0] == "currency") continue;
      if (row.size() != 3)
        throw ConfigError("fx file " + path + ": row " + std::to_string(i + 1) +
                          " needs 3 columns (currency,date,rate_to_eur)");
      double rate = 0;
      try {
        rate = std::stod(row[2]);
      } catch (...) {
        throw ConfigError("fx file " + path + ": bad rate '" + row[2] + "'");
      }
      t.add(row[0], parse_date(row[1]), rate);
    }
    return t;
  }

 private:
  std::map<std::pair<std::string, Date>, double> rates_;
};

}  // namespace tourmon
