#include "authclust/text.hpp"

namespace authclust::text {

namespace {
constexpr char32_t kReplacement = 0xFFFD;
}

std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > n) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (int j = 1; j < len; ++j) {
      const unsigned char bj = static_cast<unsigned char>(s[i + j]);
      if ((bj & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (bj & 0x3F);
    }
    if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF) ||
        (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_whitespace(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_word_char(char32_t cp) {
  if ((cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') ||
      (cp >= 'a' && cp <= 'z'))
    return true;
  if (cp < 0xC0) return false;
  // Latin-1 letters minus the multiply/divide signs.
  if (cp <= 0xFF) return cp != 0xD7 && cp != 0xF7;
  // Latin Extended-A/B, IPA extensions.
  if (cp <= 0x2AF) return true;
  // Combining diacritical marks continue a word.
  if (cp >= 0x300 && cp <= 0x36F) return true;
  if (cp >= 0x370 && cp <= 0x3FF) {
    // Greek block minus numeral signs, tonos marks, ano teleia and the
    // Greek question mark.
    switch (cp) {
      case 0x374: case 0x375: case 0x37E: case 0x384: case 0x385: case 0x387:
        return false;
      default:
        return true;
    }
  }
  if (cp >= 0x400 && cp <= 0x4FF) return true;    // Cyrillic
  if (cp >= 0x1E00 && cp <= 0x1EFF) return true;  // Latin Extended Additional
  if (cp >= 0x1F00 && cp <= 0x1FFF) {
    // Greek Extended minus spacing diacritics.
    switch (cp) {
      case 0x1FBD: case 0x1FBF: case 0x1FC0: case 0x1FC1: case 0x1FCD:
      case 0x1FCE: case 0x1FCF: case 0x1FDD: case 0x1FDE: case 0x1FDF:
      case 0x1FED: case 0x1FEE: case 0x1FEF: case 0x1FFD: case 0x1FFE:
        return false;
      default:
        return true;
    }
  }
  return false;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  // Latin Extended-A: upper/lower interleave in pairs.
  if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
    return (cp % 2 == 1) ? cp + 1 : cp;
  }
  if (cp == 0x178) return 0xFF;  // Y with diaeresis
  // Greek accented capitals.
  switch (cp) {
    case 0x386: return 0x3AC;
    case 0x388: return 0x3AD;
    case 0x389: return 0x3AE;
    case 0x38A: return 0x3AF;
    case 0x38C: return 0x3CC;
    case 0x38E: return 0x3CD;
    case 0x38F: return 0x3CE;
    default: break;
  }
  if (cp >= 0x391 && cp <= 0x3A1) return cp + 0x20;
  if (cp >= 0x3A3 && cp <= 0x3AB) return cp + 0x20;
  // Cyrillic.
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  // Latin Extended Additional pairs.
  if (cp >= 0x1E00 && cp <= 0x1EFF) return (cp % 2 == 0) ? cp + 1 : cp;
  // Greek Extended: capitals sit 8 above their lowercase forms.
  if ((cp >= 0x1F08 && cp <= 0x1F0F) || (cp >= 0x1F18 && cp <= 0x1F1D) ||
      (cp >= 0x1F28 && cp <= 0x1F2F) || (cp >= 0x1F38 && cp <= 0x1F3F) ||
      (cp >= 0x1F48 && cp <= 0x1F4D) || (cp >= 0x1F68 && cp <= 0x1F6F) ||
      cp == 0x1F59 || cp == 0x1F5B || cp == 0x1F5D || cp == 0x1F5F) {
    return cp - 8;
  }
  return cp;
}

}  // namespace authclust::text
