#include <array>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "tablegen.hpp"

namespace chartsynth::tablegen {

namespace {

using namespace std::string_view_literals;

constexpr std::array kCountries = {
    "Argentina"sv, "Australia"sv, "Austria"sv, "Bangladesh"sv, "Belgium"sv, "Bolivia"sv,
    "Brazil"sv, "Bulgaria"sv, "Canada"sv, "Chile"sv, "China"sv, "Colombia"sv,
    "Croatia"sv, "Cuba"sv, "Czechia"sv, "Denmark"sv, "Ecuador"sv, "Egypt"sv,
    "Estonia"sv, "Ethiopia"sv, "Finland"sv, "France"sv, "Georgia"sv, "Germany"sv,
    "Ghana"sv, "Greece"sv, "Hungary"sv, "Iceland"sv, "India"sv, "Indonesia"sv,
    "Iran"sv, "Ireland"sv, "Israel"sv, "Italy"sv, "Jamaica"sv, "Japan"sv,
    "Jordan"sv, "Kenya"sv, "Latvia"sv, "Lebanon"sv, "Lithuania"sv, "Malaysia"sv,
    "Mexico"sv, "Mongolia"sv, "Morocco"sv, "Nepal"sv, "Netherlands"sv, "Nigeria"sv,
    "Norway"sv, "Pakistan"sv, "Panama"sv, "Peru"sv, "Poland"sv, "Portugal"sv,
    "Qatar"sv, "Romania"sv, "Rwanda"sv, "Senegal"sv, "Serbia"sv, "Singapore"sv,
    "Slovakia"sv, "Slovenia"sv, "Spain"sv, "Sweden"sv, "Switzerland"sv, "Thailand"sv,
    "Tunisia"sv, "Turkey"sv, "Uganda"sv, "Ukraine"sv, "Uruguay"sv, "Vietnam"sv,
    "Zambia"sv, "Zimbabwe"sv,
};

constexpr std::array kYears = {
    "1990"sv, "1991"sv, "1992"sv, "1993"sv, "1994"sv, "1995"sv, "1996"sv, "1997"sv,
    "1998"sv, "1999"sv, "2000"sv, "2001"sv, "2002"sv, "2003"sv, "2004"sv, "2005"sv,
    "2006"sv, "2007"sv, "2008"sv, "2009"sv, "2010"sv, "2011"sv, "2012"sv, "2013"sv,
    "2014"sv, "2015"sv, "2016"sv, "2017"sv, "2018"sv, "2019"sv, "2020"sv, "2021"sv,
    "2022"sv, "2023"sv, "2024"sv,
};

constexpr std::array kCategories = {
    "Agriculture"sv, "Apparel"sv, "Banking"sv, "Chemicals"sv, "Construction"sv,
    "Education"sv, "Electronics"sv, "Energy"sv, "Entertainment"sv, "Fishing"sv,
    "Food"sv, "Forestry"sv, "Furniture"sv, "Healthcare"sv, "Hospitality"sv,
    "Insurance"sv, "Logistics"sv, "Machinery"sv, "Media"sv, "Metals"sv, "Mining"sv,
    "Pharmaceuticals"sv, "Plastics"sv, "Publishing"sv, "Real estate"sv, "Retail"sv,
    "Shipping"sv, "Software"sv, "Sports"sv, "Steel"sv, "Telecom"sv, "Textiles"sv,
    "Tobacco"sv, "Tourism"sv, "Transport"sv, "Utilities"sv, "Wholesale"sv, "Wine"sv,
};

constexpr std::array kMonths = {
    "Jan"sv, "Feb"sv, "Mar"sv, "Apr"sv, "May"sv, "Jun"sv,
    "Jul"sv, "Aug"sv, "Sep"sv, "Oct"sv, "Nov"sv, "Dec"sv,
};

}  // namespace

// Column headers: measured quantities, independent of the row vocabulary.
extern const std::array<std::string_view, 32> kSeriesNames;
const std::array<std::string_view, 32> kSeriesNames = {
    "Revenue"sv, "Exports"sv, "Imports"sv, "Population"sv, "Sales"sv, "Profit"sv,
    "Employment"sv, "Output"sv, "Spending"sv, "Investment"sv, "Users"sv, "Visitors"sv,
    "Emissions"sv, "Production"sv, "Consumption"sv, "Growth"sv, "Share"sv, "Cost"sv,
    "Income"sv, "Savings"sv, "Debt"sv, "Orders"sv, "Deliveries"sv, "Enrollment"sv,
    "Subscribers"sv, "Arrivals"sv, "Capacity"sv, "Demand"sv, "Yield"sv, "Turnover"sv,
    "Margin"sv, "Rating"sv,
};

std::vector<std::string> vocabulary_ids() { return {"categories", "countries", "months", "years"}; }

std::span<const std::string_view> vocabulary(std::string_view id) {
  if (id == "countries") return kCountries;
  if (id == "years") return kYears;
  if (id == "categories") return kCategories;
  if (id == "months") return kMonths;
  throw ConfigError("label_vocabulary: unknown word list '" + std::string(id) + "'");
}

}  // namespace chartsynth::tablegen
