from editables.redirector import RedirectingFinder as F
F.install()
F.map_module('prax', '/root/pkg/src/prax/__init__.py')