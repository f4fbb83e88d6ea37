"""
GML 分布数值库

广义椭圆对称Logistic分布族：密度、归一化常数、精确抽样、仿射/边缘/条件变换、
矩与特征函数，以及基于独立求积与蒙特卡洛的校验套件。
"""

__version__ = "0.1.0"
