#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "squill/common.hpp"
#include "squill/errors.hpp"

namespace squill::sql {

enum class TokKind {
    Keyword,     // canonical uppercase in `text`
    Identifier,  // decoded name in `text`; `quoted` set if it was quoted
    String,      // decoded value in `text`
    Number,      // lexeme as written
    Blob,        // canonical X'..' lexeme
    Op,          // punctuation / operator lexeme
    End,
};

struct Token {
    TokKind kind;
    std::string text;
    std::size_t offset = 0;
    bool quoted = false;
};

bool is_keyword(const std::string& upper);

std::vector<Token> lex(const std::string& sql);

}  // namespace squill::sql
