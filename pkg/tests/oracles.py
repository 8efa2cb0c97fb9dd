"""Independent reference evaluators used to cross-check the library."""
from catslash.syntax import And, ArrConst, Bot, Eq, ExistsArr, Or, Top, substitute


def direct_truth(T, M, phi):
    # direct satisfaction in M over every constant, not just representatives
    match phi:
        case Top():
            return True
        case Bot():
            return False
        case Eq(l, r):
            cands = list(M.constants.sorts)
            cl = [n for n in cands if T.query(Eq(l, ArrConst(n)))]
            cr = [n for n in cands if T.query(Eq(r, ArrConst(n)))]
            return any(M.same(a, b) for a in cl for b in cr)
        case And(a, b):
            return direct_truth(T, M, a) and direct_truth(T, M, b)
        case Or(a, b):
            return direct_truth(T, M, a) or direct_truth(T, M, b)
        case ExistsArr(v, s, body):
            names = [n for n, t in M.constants.sorts.items() if t == s]
            return any(direct_truth(T, M, substitute(body, {v: ArrConst(n)})) for n in names)
    raise TypeError(phi)
