"""Free Lie algebra on a weighted alphabet, through the Lyndon basis.

Letters are integers 0..L-1.  A word is a tuple of letters; a Lyndon
word stands for its standard bracketing, and the bracketings of the
Lyndon words of a fixed multidegree form a basis of that homogeneous
component of the free Lie algebra.

Tensor-algebra elements are plain dicts word -> coefficient.  The
bracketing of a Lyndon word expands to the word itself plus
lexicographically larger words, so a homogeneous Lie element is
converted to Lyndon coordinates by repeatedly stripping its smallest
word.  Coefficients stay exact (int / Fraction) throughout.
"""


def lyndon_words_upto(n_letters, max_len):
    """All Lyndon words over 0..n_letters-1 of length <= max_len, in
    lexicographic order (Duval's generation)."""
    if n_letters < 1 or max_len < 1:
        return []
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        m = len(w)
        out.append(tuple(w))
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == n_letters - 1:
            w.pop()
    return out


def is_lyndon(w):
    """A word is Lyndon when it is strictly smaller than each proper suffix."""
    n = len(w)
    if n == 0:
        return False
    for i in range(1, n):
        if not w < w[i:]:
            return False
    return True


def standard_factorization(w):
    """Split a Lyndon word of length >= 2 as u v with v the longest
    proper suffix that is itself Lyndon."""
    for i in range(1, len(w)):
        if is_lyndon(w[i:]):
            return w[:i], w[i:]
    raise ValueError("not a Lyndon word: %r" % (w,))


_expand_cache = {}


def expand(w):
    """Tensor expansion of the standard bracketing of the Lyndon word w.

    Returns a dict word -> int; the word w itself has coefficient 1 and
    every other word is lexicographically larger.  The returned dict is
    cached and must not be mutated.
    """
    got = _expand_cache.get(w)
    if got is not None:
        return got
    if len(w) == 1:
        res = {w: 1}
    else:
        u, v = standard_factorization(w)
        res = bracket_tensor(expand(u), expand(v))
    _expand_cache[w] = res
    return res


def concat_product(a, b):
    out = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = wa + wb
            c = out.get(w, 0) + ca * cb
            if c:
                out[w] = c
            elif w in out:
                del out[w]
    return out


def bracket_tensor(a, b):
    """[a, b] = ab - ba in the tensor algebra."""
    out = concat_product(a, b)
    for wb, cb in b.items():
        for wa, ca in a.items():
            w = wb + wa
            c = out.get(w, 0) - cb * ca
            if c:
                out[w] = c
            elif w in out:
                del out[w]
    return out


def lyndon_decompose(t):
    """Lyndon coordinates of a homogeneous Lie element of the tensor algebra.

    Repeatedly strips the lexicographically smallest word, which for a
    genuine Lie element is always Lyndon and carries the coefficient of
    its bracketing.  Raises if the input is not a Lie element.
    """
    t = {w: c for w, c in t.items() if c}
    coords = {}
    while t:
        w = min(t)
        c = t[w]
        if not is_lyndon(w):
            raise ValueError("not a Lie element (leading word %r)" % (w,))
        coords[w] = c
        for word, k in expand(w).items():
            nv = t.get(word, 0) - c * k
            if nv:
                t[word] = nv
            elif word in t:
                del t[word]
    return coords


def substitute(t, images):
    """Apply the algebra endomorphism sending letter l to the linear
    combination images[l] (a list of (letter, coeff) pairs) to a tensor
    element."""
    out = {}
    for w, c in t.items():
        partial = {(): c}
        for letter in w:
            nxt = {}
            for wp, cp in partial.items():
                for l2, c2 in images[letter]:
                    key = wp + (l2,)
                    val = nxt.get(key, 0) + cp * c2
                    if val:
                        nxt[key] = val
                    elif key in nxt:
                        del nxt[key]
            partial = nxt
        for wp, cp in partial.items():
            val = out.get(wp, 0) + cp
            if val:
                out[wp] = val
            elif wp in out:
                del out[wp]
    return out
