#pragma once

#include "errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace schottky {

/// Reduced word in the free group on a_1..a_n. Letter +k is a_k, -k is a_k^-1 (k >= 1).
/// Text form: 'a','b',... for generators and 'A','B',... for their inverses.
class Word {
public:
    Word() = default;

    explicit Word(std::vector<int> letters)
        : letters_(std::move(letters))
    {
        for (std::size_t i = 0; i < letters_.size(); ++i) {
            if (letters_[i] == 0)
                throw Error(ErrorKind::InvalidWord, "schottky", "letter 0 is not a generator");
            if (i > 0 && letters_[i] == -letters_[i - 1])
                throw Error(ErrorKind::InvalidWord, "schottky", "word is not reduced at position " + std::to_string(i));
        }
    }

    /// Freely reduces an arbitrary letter sequence.
    static Word reduce(const std::vector<int>& letters)
    {
        std::vector<int> out;
        out.reserve(letters.size());
        for (int l : letters) {
            if (l == 0)
                throw Error(ErrorKind::InvalidWord, "schottky", "letter 0 is not a generator");
            if (!out.empty() && out.back() == -l)
                out.pop_back();
            else
                out.push_back(l);
        }
        return Word(std::move(out));
    }

    static Word generator(int index, bool inverse = false)
    {
        return Word({inverse ? -(index + 1) : index + 1});
    }

    static Word parse(std::string_view text)
    {
        std::vector<int> letters;
        for (char ch : text) {
            if (std::isspace(static_cast<unsigned char>(ch)))
                continue;
            if (ch >= 'a' && ch <= 'z')
                letters.push_back(ch - 'a' + 1);
            else if (ch >= 'A' && ch <= 'Z')
                letters.push_back(-(ch - 'A' + 1));
            else
                throw Error(ErrorKind::InvalidWord, "schottky", std::string("bad letter '") + ch + "'");
        }
        return Word(std::move(letters));
    }

    const std::vector<int>& letters() const { return letters_; }
    std::size_t length() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }

    int max_generator() const
    {
        int m = 0;
        for (int l : letters_)
            m = std::max(m, std::abs(l));
        return m;
    }

    Word inverse() const
    {
        std::vector<int> out(letters_.rbegin(), letters_.rend());
        for (int& l : out)
            l = -l;
        return Word(std::move(out));
    }

    bool is_cyclically_reduced() const
    {
        return letters_.size() < 2 || letters_.front() != -letters_.back();
    }

    /// Writes the word as p w' p^-1 with w' cyclically reduced; returns w'.
    Word cyclically_reduced(Word* conjugator = nullptr) const
    {
        std::size_t i = 0, j = letters_.size();
        while (j - i >= 2 && letters_[i] == -letters_[j - 1]) {
            ++i;
            --j;
        }
        if (conjugator)
            *conjugator = Word(std::vector<int>(letters_.begin(), letters_.begin() + static_cast<long>(i)));
        return Word(std::vector<int>(letters_.begin() + static_cast<long>(i), letters_.begin() + static_cast<long>(j)));
    }

    std::size_t cyclic_length() const { return cyclically_reduced().length(); }

    Word rotated(std::size_t k) const
    {
        std::vector<int> out(letters_);
        std::rotate(out.begin(), out.begin() + static_cast<long>(k % std::max<std::size_t>(1, out.size())), out.end());
        return Word(std::move(out));
    }

    std::string to_string() const
    {
        std::string s;
        for (int l : letters_) {
            if (std::abs(l) > 26)
                return to_index_string();
            s.push_back(l > 0 ? static_cast<char>('a' + l - 1) : static_cast<char>('A' - l - 1));
        }
        return s;
    }

    friend Word operator*(const Word& x, const Word& y)
    {
        std::vector<int> all(x.letters_);
        all.insert(all.end(), y.letters_.begin(), y.letters_.end());
        return reduce(all);
    }

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;

private:
    std::string to_index_string() const
    {
        std::string s;
        for (int l : letters_) {
            if (!s.empty())
                s += ' ';
            s += "a" + std::to_string(std::abs(l)) + (l < 0 ? "^-1" : "");
        }
        return s;
    }

    std::vector<int> letters_;
};

/// If x is conjugate to the cyclically reduced word target, returns c with c x c^-1 = target.
inline std::optional<Word> conjugator_to(const Word& x, const Word& target)
{
    Word p;
    const Word core = x.cyclically_reduced(&p); // x = p core p^-1
    if (core.length() != target.length())
        return std::nullopt;
    const auto& t = target.letters();
    for (std::size_t k = 0; k < t.size(); ++k) {
        // core = s^-1 target s with s = t[0..k)
        if (target.rotated(k) == core) {
            const Word s(std::vector<int>(t.begin(), t.begin() + static_cast<long>(k)));
            return s * p.inverse();
        }
    }
    if (core.empty() && target.empty())
        return p.inverse();
    return std::nullopt;
}

/// All reduced words of exactly the given length over n generators (deterministic order).
inline std::vector<Word> reduced_words(int rank, std::size_t length)
{
    std::vector<std::vector<int>> layer { {} };
    for (std::size_t step = 0; step < length; ++step) {
        std::vector<std::vector<int>> next;
        for (const auto& w : layer) {
            for (int g = 1; g <= rank; ++g) {
                for (int l : {g, -g}) {
                    if (!w.empty() && w.back() == -l)
                        continue;
                    auto e = w;
                    e.push_back(l);
                    next.push_back(std::move(e));
                }
            }
        }
        layer = std::move(next);
    }
    std::vector<Word> out;
    out.reserve(layer.size());
    for (auto& w : layer)
        out.emplace_back(std::move(w));
    return out;
}

/// Every cyclically reduced word of the given length (no quotient by rotation or inversion).
inline std::vector<Word> cyclically_reduced_words(int rank, std::size_t length)
{
    std::vector<Word> out;
    for (auto& w : reduced_words(rank, length))
        if (w.is_cyclically_reduced())
            out.push_back(std::move(w));
    return out;
}

} // namespace schottky
