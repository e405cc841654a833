#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "conserts/diagnostics.hpp"

namespace conserts::detail {

enum class Tok {
  Ident,
  Number,  // digit run with an optional letter suffix ("30s")
  String,  // double-quoted, no escapes; value excludes the quotes
  LParen,
  RParen,
  LBrace,
  RBrace,
  Colon,
  Comma,
  Dot,
  Equal,
  Arrow,  // ->
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;        // identifier text / string content
  std::int64_t value = 0;  // Number only
  std::string suffix;      // Number only ("" or e.g. "s")
  SourceLoc loc;           // token start
  SourceLoc content_loc;   // String only: position just after the opening quote
};

// Tokenizes `text`, appending lex errors to `diags`. Always returns a stream
// terminated by an End token; unknown characters are reported and skipped so
// downstream parsing stays total. `origin` seeds the position bookkeeping,
// which lets quoted-string contents be re-lexed at their true positions.
std::vector<Token> tokenize(std::string_view text, std::vector<Diagnostic>& diags,
                            SourceLoc origin = {1, 1});

}  // namespace conserts::detail
