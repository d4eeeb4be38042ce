from math import isqrt
import mpmath as mp
mp.mp.dps = 80
def a(n): return (isqrt(4*n**3)+1)//2 if n>=1 else 0   # nint(n^(3/2))
def f(N): return mp.mpf(N)**1.5
def f1(N): return mp.mpf(3)/2*mp.sqrt(N)
def f2(N): return mp.mpf(3)/4/mp.sqrt(N)
def cn(x): return abs(x-mp.nint(x))
def conds(N,M,n,x1=100):
    return N>=x1 and cn(f(N))<mp.mpf(1)/4 and abs(f1(N)-n)<mp.mpf(1)/(8*M) and f2(N)<mp.mpf(1)/(8*M*M)
def lam(N,M,n): return all(a(N+m+1)==a(N+m)+n for m in range(M))
# n=100,M=8 feasibility
c=(mp.mpf(200)/3)**2
print("n=100 center",c, "f''", f2(c), "bound", 1/mp.mpf(8*64))
print("any N<=1e6 satisfying conds n=100 M=8:", any(conds(N,8,100) for N in range(4400,4500)))
print("exact lambda near 4444:", [N for N in range(4400,4500) if lam(N,8,100)])
def find(M,n,lo=100,hi=10**6):
    # f' increasing: candidate window
    Nc=int((mp.mpf(2*n)/3)**2)
    for N in range(max(lo,Nc-200), min(hi,Nc+200)):
        if conds(N,M,n):
            return N, lam(N,M,n)
    return None
print("n=1000 M=8:", find(8,1000))
for n in [1089,1090,1100,1200,1400]:
    print(n, find(11,n))
