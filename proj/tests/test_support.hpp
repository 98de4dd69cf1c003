#pragma once

#include "seqeff/conteffect.hpp"

namespace seqeff::testing {

// Nominal stand-in for source types.
class NameAnnot : public ce::AnnotNode {
public:
    explicit NameAnnot(std::string n) : name_(std::move(n)) {}
    std::string str() const override { return name_; }
    bool same(const ce::AnnotNode& o) const override { return o.str() == name_; }

private:
    std::string name_;
};

inline ce::Annot ty(const std::string& n) { return std::make_shared<NameAnnot>(n); }

inline ce::AnnotParser name_parser() {
    return [](std::string_view s, size_t& pos) {
        size_t b = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
        if (b == pos) throw std::runtime_error("expected a type name");
        return ty(std::string(s.substr(b, pos - b)));
    };
}

}  // namespace seqeff::testing
