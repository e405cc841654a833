#include "lexer.hpp"

#include <cctype>

namespace conserts::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_body(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view text, std::vector<Diagnostic>& diags,
                            SourceLoc origin) {
  std::vector<Token> out;
  int line = origin.line > 0 ? origin.line : 1;
  int col = origin.col > 0 ? origin.col : 1;
  size_t i = 0;
  const size_t n = text.size();

  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  auto push = [&](Tok kind, SourceLoc at) {
    Token t;
    t.kind = kind;
    t.loc = at;
    out.push_back(std::move(t));
  };

  while (i < n) {
    const char c = text[i];
    const SourceLoc at{line, col};
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(c);
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < n && text[i] != '\n') advance(text[i]);
      continue;
    }
    if (ident_start(c)) {
      std::string word;
      while (i < n) {
        const char k = text[i];
        // '-' joins an identifier only when followed by more identifier body,
        // so "a->b" still lexes as Ident Arrow Ident.
        if (ident_body(k)) {
          word.push_back(k);
          advance(k);
        } else if (k == '-' && i + 1 < n && ident_body(text[i + 1])) {
          word.push_back(k);
          advance(k);
        } else {
          break;
        }
      }
      Token t;
      t.kind = Tok::Ident;
      t.text = std::move(word);
      t.loc = at;
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::int64_t value = 0;
      std::string raw;
      bool overflow = false;
      while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
        raw.push_back(text[i]);
        if (value > 100000000) overflow = true;  // windows/orders are small
        value = value * 10 + (text[i] - '0');
        advance(text[i]);
      }
      std::string suffix;
      while (i < n && ident_body(text[i])) {
        suffix.push_back(text[i]);
        advance(text[i]);
      }
      if (overflow) {
        diags.push_back({Severity::Error, at, diag::kSyntax,
                         "number '" + raw + "' out of range", {}});
        value = 0;
      }
      Token t;
      t.kind = Tok::Number;
      t.text = raw + suffix;
      t.value = value;
      t.suffix = std::move(suffix);
      t.loc = at;
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      advance(c);
      const SourceLoc content{line, col};
      std::string body;
      bool closed = false;
      while (i < n) {
        const char k = text[i];
        if (k == '"') {
          advance(k);
          closed = true;
          break;
        }
        body.push_back(k);
        advance(k);
      }
      if (!closed) {
        diags.push_back({Severity::Error, at, diag::kSyntax, "unterminated string", {}});
      }
      Token t;
      t.kind = Tok::String;
      t.text = std::move(body);
      t.loc = at;
      t.content_loc = content;
      out.push_back(std::move(t));
      continue;
    }
    if (c == '-' && i + 1 < n && text[i + 1] == '>') {
      advance(c);
      advance('>');
      push(Tok::Arrow, at);
      continue;
    }
    switch (c) {
      case '(': advance(c); push(Tok::LParen, at); continue;
      case ')': advance(c); push(Tok::RParen, at); continue;
      case '{': advance(c); push(Tok::LBrace, at); continue;
      case '}': advance(c); push(Tok::RBrace, at); continue;
      case ':': advance(c); push(Tok::Colon, at); continue;
      case ',': advance(c); push(Tok::Comma, at); continue;
      case '.': advance(c); push(Tok::Dot, at); continue;
      case '=': advance(c); push(Tok::Equal, at); continue;
      default: break;
    }
    diags.push_back({Severity::Error, at, diag::kSyntax,
                     std::string("unexpected character '") + c + "'", {}});
    advance(c);
  }
  push(Tok::End, SourceLoc{line, col});
  return out;
}

}  // namespace conserts::detail
