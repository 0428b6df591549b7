#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tpk/formula.hpp"
#include "tpk/labeled.hpp"
#include "tpk/structure.hpp"

namespace tpk {

// Syntax error carrying the byte offset and what was expected there.
class ParseError : public std::runtime_error {
public:
  ParseError(size_t offset, std::string expected, std::string got)
      : std::runtime_error("syntax error at byte " + std::to_string(offset) + ": expected " + expected +
                           ", got '" + got + "'"),
        offset(offset),
        expected(std::move(expected)),
        got(std::move(got)) {}
  size_t offset;
  std::string expected;
  std::string got;
};

Formula parseFormula(const std::string& text);
Struct parseStruct(const std::string& text);
DisplaySequent parseDisplaySequent(const std::string& text);
LabeledSequent parseLabeledSequent(const std::string& text);

// Axiom files: one formula per line, '#' starts a comment, blank lines skipped.
std::vector<Formula> parseAxiomFile(const std::string& content);

}  // namespace tpk
