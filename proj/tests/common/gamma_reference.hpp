#pragma once

// Gamma on 200 evenly spaced points of [0.1, 20], computed with mpmath at
// 50 significant digits and rounded to 25 for storage.
// Generated by gen_gamma_reference.py.

#include <array>
#include <utility>

namespace fpg::testdata {

inline constexpr std::array<std::pair<double, double>, 200> kGammaReference = {{
    {0.1, 9.513507698668731836292487},
    {0.2, 4.590843711998803053204758},
    {0.3, 2.991568987687590628312517},
    {0.4, 2.218159543757688223059054},
    {0.5, 1.772453850905516027298167},
    {0.6, 1.489192248812817102394333},
    {0.7, 1.298055332647557785681171},
    {0.8, 1.164229713725303373636321},
    {0.9, 1.068628702119319354897305},
    {1.0, 1.0},
    {1.1, 0.9513507698668731836292487},
    {1.2, 0.9181687423997606106409517},
    {1.3, 0.897470696306277188493755},
    {1.4, 0.8872638175030752892236216},
    {1.5, 0.8862269254527580136490837},
    {1.6, 0.8935153492876902614366},
    {1.7, 0.9086387328532904499768198},
    {1.8, 0.9313837709802426989090568},
    {1.9, 0.9617658319073874194075748},
    {2.0, 1.0},
    {2.1, 1.046485846853560501992174},
    {2.2, 1.101802490879712732769142},
    {2.3, 1.166711905198160345041881},
    {2.4, 1.24216934450430540491307},
    {2.5, 1.329340388179137020473626},
    {2.6, 1.42962455886030441829856},
    {2.7, 1.544685845850593764960594},
    {2.8, 1.676490787764436858036302},
    {2.9, 1.827355080624036096874392},
    {3.0, 2.0},
    {3.1, 2.197620278392477054183565},
    {3.2, 2.423965479935368012092112},
    {3.3, 2.683437381955768793596327},
    {3.4, 2.981206426810332971791369},
    {3.5, 3.323350970447842551184064},
    {3.6, 3.717023853036791487576256},
    {3.7, 4.170651783796603165393603},
    {3.8, 4.694174205740423202501646},
    {3.9, 5.299329733809704680935737},
    {4.0, 6.0},
    {4.1, 6.81262286301667886796905},
    {4.2, 7.75668953579317763869476},
    {4.3, 8.85534336045403701886788},
    {4.4, 10.13610185115513210409065},
    {4.5, 11.63172839656744892914422},
    {4.6, 13.38128587093244935527452},
    {4.7, 15.43141160004743171195633},
    {4.8, 17.83786198181360816950625},
    {4.9, 20.66738596185784825564937},
    {5.0, 24.0},
    {5.1, 27.93175373836838335867311},
    {5.2, 32.57809605033134608251799},
    {5.3, 38.07797644995235918113188},
    {5.4, 44.59884814508258125799887},
    {5.5, 52.34277778455352018114901},
    {5.6, 61.5539150062892670342628},
    {5.7, 72.52763452022292904619476},
    {5.8, 85.62173751270531921363002},
    {5.9, 101.2701912131034564526819},
    {6.0, 120.0},
    {6.1, 142.4519440656787551292328},
    {6.2, 169.4060994617229996290935},
    {6.3, 201.813275184747503659999},
    {6.4, 240.8337799834459387931939},
    {6.5, 287.8852778150443609963195},
    {6.6, 344.7019240352198953918717},
    {6.7, 413.4075167652706955633101},
    {6.8, 496.6060775736908514390541},
    {6.9, 597.4941281573103930708234},
    {7.0, 720.0},
    {7.1, 868.9568588006404062883203},
    {7.2, 1050.31781666268259770038},
    {7.3, 1271.423633663909273057994},
    {7.4, 1541.336191894054008276441},
    {7.5, 1871.254305797788346476077},
    {7.6, 2275.032698632451309586353},
    {7.7, 2769.830362327313660274178},
    {7.8, 3376.921327501097789785568},
    {7.9, 4122.709484285441712188682},
    {8.0, 5040.0},
    {8.1, 6169.593697484546884647074},
    {8.2, 7562.288279971314703442736},
    {8.3, 9281.392525746537693323353},
    {8.4, 11405.88782001599966124566},
    {8.5, 14034.40729348341259857058},
    {8.6, 17290.24850960662995285628},
    {8.7, 21327.69378992031518411117},
    {8.8, 26339.98635450856276032743},
    {8.9, 32569.40492585498952629059},
    {9.0, 40320.0},
    {9.1, 49973.7089496248297656413},
    {9.2, 62010.76389576478056823044},
    {9.3, 77035.55796369626285458383},
    {9.4, 95809.45768813439715446358},
    {9.5, 119292.4619946090070878499},
    {9.6, 148696.137182617017594564},
    {9.7, 185550.9359723067421017672},
    {9.8, 231791.8799196753522908814},
    {9.9, 289867.7038401094067839862},
    {10.0, 362880.0},
    {10.1, 454760.7514415859508673358},
    {10.2, 570499.02784103598122772},
    {10.3, 716430.6890623752445476297},
    {10.4, 900608.9022684633332519576},
    {10.5, 1133278.388948785567334574},
    {10.6, 1427482.916953123368907815},
    {10.7, 1799844.078931375398387142},
    {10.8, 2271560.423212818452450638},
    {10.9, 2869690.268017083127161463},
    {11.0, 3628800.0},
    {11.1, 4593083.589560018103760092},
    {11.2, 5819090.083978567008522744},
    {11.3, 7379236.097342465018840585},
    {11.4, 9366332.583592018665820359},
    {11.5, 11899423.08396224845701303},
    {11.6, 15131318.91970310771042284},
    {11.7, 19258331.64456571676274241},
    {11.8, 24532852.57069843928646689},
    {11.9, 31279623.92138620608605995},
    {12.0, 39916800.0},
    {12.1, 50983227.84411620095173702},
    {12.2, 65173808.94055995049545473},
    {12.3, 83385367.89996985471289862},
    {12.4, 106776191.4529490127903521},
    {12.5, 136843365.4655658572556498},
    {12.6, 175523299.4685560494409049},
    {12.7, 225322480.2414188861240862},
    {12.8, 289487660.3342415835803093},
    {12.9, 372227524.6644958524241134},
    {13.0, 479001600.0},
    {13.1, 616897056.913806031516018},
    {13.2, 795120469.0748313960445477},
    {13.3, 1025640025.169629212968653},
    {13.4, 1324024774.016567758600366},
    {13.5, 1710542068.319573215695623},
    {13.6, 2211593573.303806222955402},
    {13.7, 2861595499.066019853775895},
    {13.8, 3705442052.278292269827959},
    {13.9, 4801735068.171996496271063},
    {14.0, 6227020800.0},
    {14.1, 8081351445.570859012859835},
    {14.2, 10495590191.78777442778803},
    {14.3, 13641012334.75606853248308},
    {14.4, 17741931971.8220079652449},
    {14.5, 23092317922.31423841189091},
    {14.6, 30077672596.93176463219347},
    {14.7, 39203858337.20447199672977},
    {14.8, 51135100321.44043332362583},
    {14.9, 66744117447.59075129816778},
    {15.0, 87178291200.0},
    {15.1, 113947055382.5491120813237},
    {15.2, 149037380723.38639687459},
    {15.3, 195066476387.0117800145081},
    {15.4, 255483820394.2369146995266},
    {15.5, 334838609873.5564569724182},
    {15.6, 439134019915.2037636300246},
    {15.7, 576296717556.9057383519276},
    {15.8, 756799484757.3184131896623},
    {15.9, 994487349969.1021943426999},
    {16.0, 1307674368000.0},
    {16.1, 1720600536276.491592427988},
    {16.2, 2265368186995.473232493768},
    {16.3, 2984517088721.280234221974},
    {16.4, 3934450834071.24848637271},
    {16.5, 5189998453040.125083072482},
    {16.6, 6850490710677.178712628384},
    {16.7, 9047858465643.420092125263},
    {16.8, 11957431859165.63092839666},
    {16.9, 15812348864508.72489004893},
    {17.0, 20922789888000.0},
    {17.1, 27701668634051.5146380906},
    {17.2, 36698964629326.66636639905},
    {17.3, 48647628546156.86781781818},
    {17.4, 64524993678768.47517651244},
    {17.5, 85634974475162.06387069595},
    {17.6, 113718145797241.1666296312},
    {17.7, 151099236376245.1155384919},
    {17.8, 200884855233982.599597064},
    {17.9, 267228695810197.4506418269},
    {18.0, 355687428096000.0},
    {18.1, 473698533642280.9003113492},
    {18.2, 631222191624418.6615020636},
    {18.3, 841603973848513.8132482545},
    {18.4, 1122734890010571.468071317},
    {18.5, 1498612053315336.117737179},
    {18.6, 2001439366031444.532681509},
    {18.7, 2674456483859538.545031306},
    {18.8, 3575750423164890.272827738},
    {18.9, 4783393655002534.366488701},
    {19.0, 6402373705728000.0},
    {19.1, 8573943458925284.295635421},
    {19.2, 11488243887564419.63933756},
    {19.3, 15401352721427802.78244306},
    {19.4, 20658321976194515.01251222},
    {19.5, 27724322986333718.17813781},
    {19.6, 37226772208184868.30787606},
    {19.7, 50012336248173370.79208543},
    {19.8, 67224107955499937.12916148},
    {19.9, 90406140079547899.52663645},
    {20.0, 121645100408832000.0},
}};

}  // namespace fpg::testdata
